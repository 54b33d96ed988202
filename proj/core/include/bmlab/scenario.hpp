#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bmlab/concavity.hpp"
#include "bmlab/parallel.hpp"
#include "bmlab/supconv.hpp"

namespace bmlab {

using json = nlohmann::json;

// Descriptor parsing. `path` names the field in error messages, e.g. "sets[1]".

/// Number, or one of the strings "inf", "+inf", "-inf".
double parse_extended(const json& j, const std::string& path);
/// "a:b:step" string or an explicit array of numbers.
std::vector<double> parse_grid(const json& j, const std::string& path);
std::vector<double> parse_grid_spec(const std::string& spec);
Density1D parse_density_1d(const json& j, const std::string& path);
/// 1-D kinds parse to Density1D; product, gaussian-standard,
/// exponential-product, custom-2d and multi-dimensional lebesgue to DensityND.
Density parse_density(const json& j, const std::string& path);
/// Full-line sets are only accepted inside product factors.
SetRep parse_set(const json& j, const std::string& path);
QuadraturePolicy parse_policy(const json& j, const std::string& path, QuadraturePolicy base = {});
GridFunction1D parse_grid_function_1d(const json& j, const std::string& path);
GridFunction2D parse_grid_function_2d(const json& j, const std::string& path);

enum class Command {
  check_bm,
  scan_dilates,
  b_property,
  prop_equiv,
  prop_concave,
  slab,
  bonnesen,
  hm,
  dancs_uhrin,
  counterexample_power,
  counterexample_search,
  parallel,
};

const char* to_string(Command c);
Command parse_command(const std::string& name);

struct ScenarioConfig {
  std::string name = "scenario";
  Command command = Command::check_bm;
  std::optional<Density> measure;
  std::vector<SetRep> sets;
  std::optional<double> s;
  std::vector<double> lambda_grid = default_lambda_grid();
  std::vector<double> t_grid;
  QuadraturePolicy policy{};
  CheckTolerance tolerance{};
  std::uint64_t seed = 1;
  std::string output;
  // Whole document, for command-specific fields.
  json raw;
};

/// Validates common and command-specific fields; throws ConfigError.
ScenarioConfig parse_scenario(const json& j);
/// Reads and parses a scenario file. Malformed JSON raises ConfigError with line and column.
ScenarioConfig load_scenario(const std::filesystem::path& path);

struct ScenarioOverrides {
  std::optional<double> abs_tol;
  std::optional<double> rel_tol;
  std::optional<int> section_grid;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<double>> lambda_grid;
  std::optional<std::vector<double>> t_grid;
};

void apply_overrides(ScenarioConfig& cfg, const ScenarioOverrides& o);

struct ScenarioResult {
  json document;
  std::optional<std::string> csv;
  int exit_code = 0;
};

/// 0 for pass, vacuous or exploratory reports; 1 for a violation.
int exit_code_for(const ConcavityReport& r);

/// Runs the command. Module errors propagate; the CLI maps them to exit 2.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

json report_to_json(const ConcavityReport& r);

/// Sorted keys, numbers as %.17g, non-finite numbers as the strings
/// "inf"/"-inf" and NaN as null. Ends with a newline.
std::string canonical_json(const json& j);

/// Header row then one row per sample.
std::string curve_csv(std::span<const double> ts, std::span<const double> values,
                      const std::string& value_name = "value");
/// t, value, cumulative-deficit: the running minimum of three-point deficits
/// of F^s up to each t (empty where no deficit is defined yet).
std::string parallel_csv(const ParallelCurve& curve, double s);

/// Writes <stem>.json and, when present, <stem>.csv. Throws std::runtime_error on I/O failure.
void write_outputs(const ScenarioResult& result, const std::filesystem::path& json_path);

}  // namespace bmlab

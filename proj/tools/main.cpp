// bmlab: run concavity checks, counterexample searches and parallel-volume
// scans from scenario files or flags.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bmlab/errors.hpp"
#include "bmlab/scenario.hpp"

namespace {

using bmlab::json;

json parse_inline(const std::string& text, const std::string& flag) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw bmlab::ConfigError("option " + flag + ": malformed JSON: " + e.what());
  }
}

// Measure shorthands accepted by --measure besides a JSON descriptor.
json measure_arg(const std::string& text) {
  if (text.empty() || text.front() != '{') return text;
  return parse_inline(text, "--measure");
}

int finish(const bmlab::ScenarioConfig& cfg, const bmlab::ScenarioResult& result, const std::string& out_dir,
           bool csv_to_stdout) {
  if (csv_to_stdout && result.csv) {
    std::cout << *result.csv;
  } else {
    std::cout << bmlab::canonical_json(result.document);
  }
  std::filesystem::path target;
  if (!out_dir.empty()) {
    target = std::filesystem::path(out_dir) / (cfg.name + ".json");
  } else if (!cfg.output.empty()) {
    target = cfg.output;
  }
  if (!target.empty()) bmlab::write_outputs(result, target);
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of Brunn-Minkowski-type concavity for convex measures"};
  app.require_subcommand(0, 1);

  std::string scenario_path;
  std::string out_dir;
  bmlab::ScenarioOverrides overrides;
  std::optional<double> abs_tol;
  std::optional<double> rel_tol;
  std::optional<int> section_grid;
  std::optional<std::uint64_t> seed;
  std::string lambda_grid;
  std::string t_grid;

  auto add_common = [&](CLI::App* a) {
    a->add_option("--abs-tol", abs_tol, "Absolute quadrature tolerance");
    a->add_option("--rel-tol", rel_tol, "Relative quadrature tolerance");
    a->add_option("--section-grid", section_grid, "Offsets sampled by maximal-section sweeps");
    a->add_option("--seed", seed, "Random seed");
    a->add_option("--out", out_dir, "Directory for JSON/CSV reports");
    a->add_option("--lambda-grid", lambda_grid, "Lambda grid a:b:step");
    a->add_option("--t-grid", t_grid, "t grid a:b:step");
  };
  add_common(&app);
  app.add_option("--scenario", scenario_path, "Scenario JSON file");

  auto* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  add_common(run);

  auto* ce = app.add_subcommand("counterexample", "Counterexample tools");
  ce->require_subcommand(1);
  auto* power = ce->add_subcommand("power", "Closed-form power-density family");
  double p_s = 0.5, p_r = 1.0, p_b = 1.0;
  std::optional<double> p_a;
  power->add_option("--s", p_s, "Concavity class of the measure, in (0, 1)")->required();
  power->add_option("--r", p_r, "Target mean exponent, r > s")->required();
  power->add_option("--b", p_b, "Half-width of B")->required();
  power->add_option("--a", p_a, "Half-width of A (searched when omitted)");
  add_common(power);

  auto* search = ce->add_subcommand("search", "Parametric planar violation search");
  std::string family = "triangle";
  std::string search_measure = "gaussian";
  double search_s = 0.5;
  std::size_t budget = 20000;
  search->add_option("--family", family, "triangle | halfplane | symmetric-dilate");
  search->add_option("--measure", search_measure, "gaussian | exp-product | lebesgue | JSON descriptor");
  search->add_option("--s", search_s, "Mean exponent")->required();
  search->add_option("--budget", budget, "Deficit evaluations");
  add_common(search);

  auto* par = app.add_subcommand("parallel", "Generalized parallel volume t -> mu(A + tB)");
  std::string par_measure;
  std::string par_a;
  std::string par_b;
  double par_s = 0.5;
  par->add_option("--measure", par_measure, "Density descriptor (JSON)")->required();
  par->add_option("--A", par_a, "Set descriptor (JSON)")->required();
  par->add_option("--B", par_b, "Convex set descriptor (JSON)")->required();
  par->add_option("--t", t_grid, "t grid a:b:step")->required();
  par->add_option("--s", par_s, "Concavity exponent")->required();
  add_common(par);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    json doc;
    bool csv_to_stdout = false;
    if (*power) {
      doc = {{"name", "counterexample-power"}, {"command", "counterexample-power"}, {"s", p_s}, {"r", p_r}, {"b", p_b}};
      if (p_a) doc["a"] = *p_a;
    } else if (*search) {
      doc = {{"name", "counterexample-search"}, {"command", "counterexample-search"}, {"family", family},
             {"measure", measure_arg(search_measure)}, {"s", search_s}, {"budget", budget}};
    } else if (*par) {
      doc = {{"name", "parallel"}, {"command", "parallel"}, {"measure", parse_inline(par_measure, "--measure")},
             {"sets", json::array({parse_inline(par_a, "--A"), parse_inline(par_b, "--B")})},
             {"t_grid", t_grid}, {"s", par_s}};
      csv_to_stdout = true;
    } else if (scenario_path.empty()) {
      std::cerr << app.help();
      return 2;
    }

    bmlab::ScenarioConfig cfg = doc.is_null() ? bmlab::load_scenario(scenario_path) : bmlab::parse_scenario(doc);
    overrides.abs_tol = abs_tol;
    overrides.rel_tol = rel_tol;
    overrides.section_grid = section_grid;
    overrides.seed = seed;
    if (!lambda_grid.empty()) overrides.lambda_grid = bmlab::parse_grid_spec(lambda_grid);
    if (!t_grid.empty()) overrides.t_grid = bmlab::parse_grid_spec(t_grid);
    bmlab::apply_overrides(cfg, overrides);

    const auto result = bmlab::run_scenario(cfg);
    return finish(cfg, result, out_dir, csv_to_stdout);
  } catch (const std::exception& e) {
    std::cerr << "bmlab: error: " << e.what() << "\n";
    return 2;
  }
}

#include <doctest.h>

#include <cmath>

#include "bmlab/errors.hpp"
#include "bmlab/means.hpp"
#include "bmlab/supconv.hpp"
#include "support/oracles.hpp"

using namespace bmlab;

namespace {

GridFunction1D indicator(double lo, double hi, double x0, double step, std::size_t n) {
  GridFunction1D f{x0, step, std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i)
    if (f.x(i) >= lo - 1e-12 && f.x(i) <= hi + 1e-12) f.values[i] = 1.0;
  return f;
}

// Unimodal profile on the grid with maximum exactly `top` at a random node.
GridFunction1D random_unimodal(oracle::Rng& r, double x0, double step, std::size_t n, double top) {
  GridFunction1D f{x0, step, std::vector<double>(n, 0.0)};
  const std::size_t lo = r.integer(5, static_cast<int>(n / 2));
  const std::size_t hi = r.integer(static_cast<int>(n / 2) + 1, static_cast<int>(n) - 5);
  const std::size_t m = r.integer(static_cast<int>(lo), static_cast<int>(hi));
  f.values[m] = top;
  for (std::size_t i = m; i-- > lo;) f.values[i] = f.values[i + 1] * r.uniform(0.85, 1.0);
  for (std::size_t i = m + 1; i <= hi; ++i) f.values[i] = f.values[i - 1] * r.uniform(0.85, 1.0);
  return f;
}

bool unimodal(const std::vector<double>& v) {
  std::size_t i = 0;
  while (i + 1 < v.size() && v[i + 1] >= v[i]) ++i;
  while (i + 1 < v.size() && v[i + 1] <= v[i]) ++i;
  return i + 1 == v.size();
}

}  // namespace

TEST_CASE("supconv_min examples") {
  const double step = 0.05;
  const std::size_t n = 81;  // grid on [-1, 3]
  const auto f = indicator(0, 1, -1, step, n);
  const auto h = supconv_min(f, f, 0.5);
  for (std::size_t i = 0; i < n; ++i) CHECK(h.values[i] == f.values[i]);

  const auto g = indicator(2, 3, -1, step, n);
  const auto h2 = supconv_min(f, g, 0.5);
  const auto want = indicator(1, 2, -1, step, n);
  for (std::size_t i = 0; i < n; ++i) CHECK(h2.values[i] == want.values[i]);

  CHECK_THROWS_AS(supconv_min(f, GridFunction1D{0.0, step, f.values}, 0.5), DomainError);
}

TEST_CASE("supconv_min output is admissible and unimodal") {
  oracle::Rng r(91);
  for (int k = 0; k < 20; ++k) {
    const auto f = random_unimodal(r, -4, 8.0 / 255, 256, 1.0);
    const auto g = random_unimodal(r, -4, 8.0 / 255, 256, r.uniform(0.5, 2));
    const double l = r.uniform(0, 1);
    const auto h = supconv_min(f, g, l);
    CHECK(unimodal(h.values));
    // Direct re-check of h((1-l)x + l y) >= min(f(x), g(y)) for all grid pairs.
    bool ok = true;
    for (std::size_t i = 0; i < f.size() && ok; ++i)
      for (std::size_t j = 0; j < g.size(); ++j) {
        const long z = std::clamp(std::lround((1 - l) * i + l * j), 0L, static_cast<long>(h.size()) - 1);
        if (h.values[z] < std::min(f.values[i], g.values[j])) {
          ok = false;
          break;
        }
      }
    CHECK(ok);
  }
}

TEST_CASE("check_henstock_macbeath examples") {
  oracle::Rng r(93);
  const auto f = random_unimodal(r, -4, 8.0 / 255, 256, 1.0);
  const auto same = check_henstock_macbeath(f, f, 0.0);
  CHECK(same.passed());
  CHECK(std::abs(same.worst_deficit) < 1e-12);

  // f = 1_[-a,a] phi and g = 1_[-b,b] phi with phi unimodal at 0.
  const double step = 8.0 / 255;
  GridFunction1D fa{-4, step, std::vector<double>(256)};
  GridFunction1D gb{-4, step, std::vector<double>(256)};
  for (std::size_t i = 0; i < 256; ++i) {
    const double x = fa.x(i);
    const double phi = std::exp(-0.5 * x * x);
    fa.values[i] = std::abs(x) <= 1.0 ? phi : 0.0;
    gb.values[i] = std::abs(x) <= 2.5 ? phi : 0.0;
  }
  // Both maxima are attained at the node closest to 0.
  CHECK(check_henstock_macbeath(fa, gb, 0.5).passed());

  GridFunction1D low = f;
  for (auto& v : low.values) v *= 0.5;
  CHECK(check_henstock_macbeath(f, low, 0.5).vacuous());
}

TEST_CASE("henstock-macbeath holds on random equal-max pairs") {
  oracle::Rng r(97);
  for (int k = 0; k < 200; ++k) {
    const auto f = random_unimodal(r, -4, 8.0 / 255, 256, 1.0);
    const auto g = random_unimodal(r, -4, 8.0 / 255, 256, 1.0);
    const auto rep = check_henstock_macbeath(f, g, 0.3);
    CHECK(rep.passed());
  }
}

TEST_CASE("supconv_gamma_2d respects the resource cap") {
  GridFunction2D big{0, 0, 1, 1, 65, 65, std::vector<double>(65 * 65, 1.0)};
  CHECK_THROWS_AS(supconv_gamma_2d(big, big, 0.5), ResourceError);
}

namespace {

GridFunction2D product_grid(oracle::Rng& r, std::size_t n, double top) {
  GridFunction2D f{-2, -2, 4.0 / (n - 1), 4.0 / (n - 1), n, n, std::vector<double>(n * n)};
  const auto px = random_unimodal(r, -2, f.dx, n, 1.0);
  const auto py = random_unimodal(r, -2, f.dy, n, top);
  for (std::size_t iy = 0; iy < n; ++iy)
    for (std::size_t ix = 0; ix < n; ++ix) f.values[iy * n + ix] = px.values[ix] * py.values[iy];
  return f;
}

// Rescales g's values so its grid maximal section along e1 matches f's.
void match_sections(const GridFunction2D& f, GridFunction2D& g) {
  const double c = grid_max_section(f, DirectionUnit::e1()) / grid_max_section(g, DirectionUnit::e1());
  for (auto& v : g.values) v *= c;
}

}  // namespace

TEST_CASE("dancs-uhrin examples") {
  oracle::Rng r(101);
  const auto f = product_grid(r, 32, 1.0);
  const auto same = check_dancs_uhrin(f, f, DirectionUnit::e1(), 0.0);
  CHECK(same.passed());
  CHECK(same.worst_deficit >= -1e-12);

  auto g = product_grid(r, 32, 1.0);
  match_sections(f, g);
  CHECK(check_dancs_uhrin(f, g, DirectionUnit::e1(), 0.5).passed());

  // gamma = 0 pairing on log-concave samples.
  GridFunction2D lf{-2, -2, 4.0 / 31, 4.0 / 31, 32, 32, std::vector<double>(32 * 32)};
  GridFunction2D lg = lf;
  for (std::size_t iy = 0; iy < 32; ++iy)
    for (std::size_t ix = 0; ix < 32; ++ix) {
      const double x = lf.x0 + ix * lf.dx, y = lf.y0 + iy * lf.dy;
      lf.values[iy * 32 + ix] = std::exp(-x * x - y * y);
      lg.values[iy * 32 + ix] = std::exp(-std::abs(x - 0.3) - 0.5 * y * y);
    }
  match_sections(lf, lg);
  CHECK(check_dancs_uhrin(lf, lg, DirectionUnit::e1(), 0.5, 0.0).passed());

  auto off = g;
  for (auto& v : off.values) v *= 2.0;
  CHECK(check_dancs_uhrin(f, off, DirectionUnit::e1(), 0.5).vacuous());
}

TEST_CASE("supconv_gamma_2d is admissible") {
  oracle::Rng r(103);
  const auto f = product_grid(r, 12, 1.0);
  const auto g = product_grid(r, 12, 1.5);
  const double l = 0.4;
  const auto h = supconv_gamma_2d(f, g, l, -1.0);
  bool ok = true;
  for (std::size_t a = 0; a < 144; ++a)
    for (std::size_t b = 0; b < 144; ++b) {
      const double fv = f.values[a], gv = g.values[b];
      if (!(fv > 0 && gv > 0)) continue;
      const long zx = std::lround((1 - l) * (a % 12) + l * (b % 12));
      const long zy = std::lround((1 - l) * (a / 12) + l * (b / 12));
      if (h.at(zx, zy) < power_mean(fv, gv, l, -1.0) - 1e-15) ok = false;
    }
  CHECK(ok);
}

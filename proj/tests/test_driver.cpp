#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mfchaos/driver.hpp"

using namespace mfchaos;

namespace {

DriverSpec mp_spec(double a, double b, double amp, double freq) {
  return DriverSpec(MonotonePerturbedDriver{a, b, amp, freq});
}

DriverSpec tanh_custom() {
  CustomDriver c;
  c.h = [](double t, double x, double z) {
    return 2.0 * z + 0.5 * std::tanh(z) + 0.1 * std::sin(x + t) - 3.0;
  };
  c.dz_h = [](double, double, double z) {
    const double s = 1.0 / std::cosh(z);
    return 2.0 + 0.5 * s * s;
  };
  return DriverSpec(std::move(c));
}

/// Independent root oracle: plain bisection on a wide fixed bracket.
double bisect_oracle(const DriverSpec& s, double t, double x, double v) {
  double lo = -1e6, hi = 1e6;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (h_value(s, t, x, mid) < v ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("linear driver inverts in closed form") {
  const DriverSpec d1(LinearDriver{1.0, 2.0});
  CHECK(invert_driver(d1, 0, 0, 0.0) == 2.0);
  const DriverSpec d2(LinearDriver{1.0, 3.0});
  CHECK(invert_driver(d2, 0, 0, 1.0) == 4.0);
  CHECK(invert_driver(d2, 0.3, -5.0, 0.25) == doctest::Approx(3.25).epsilon(1e-15));
}

TEST_CASE("monotone perturbed inversion meets the residual tolerance") {
  const DriverSpec d = mp_spec(1.0, 2.0, 0.1, 1.0);
  const double nu = invert_driver(d, 0, 0, 0.5);
  CHECK(std::abs(h_value(d, 0, 0, nu) - 0.5) <= 1e-12);
}

TEST_CASE("residual contract holds for random inputs on every iterative kind") {
  std::mt19937_64 rng(91);
  std::uniform_real_distribution<double> uv(0.0, 5.0), ut(0.0, 1.0), ux(-10.0, 10.0);
  const DriverSpec mp = mp_spec(1.5, 2.0, 0.2, 3.0);
  const DriverSpec cu = tanh_custom();
  for (int i = 0; i < 2000; ++i) {
    const double t = ut(rng), x = ux(rng), v = uv(rng);
    for (const DriverSpec* s : {&mp, &cu}) {
      const double nu = invert_driver(*s, t, x, v);
      CHECK(std::abs(h_value(*s, t, x, nu) - v) <= 1e-12);
    }
  }
}

TEST_CASE("inverse is strictly increasing in v") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uv(0.0, 4.0);
  const DriverSpec lin(LinearDriver{2.0, 1.0});
  const DriverSpec mp = mp_spec(1.0, 2.0, 0.1, 1.0);
  const DriverSpec cu = tanh_custom();
  for (int i = 0; i < 500; ++i) {
    double v1 = uv(rng), v2 = uv(rng);
    if (v1 == v2) continue;
    if (v1 > v2) std::swap(v1, v2);
    for (const DriverSpec* s : {&lin, &mp, &cu})
      CHECK(invert_driver(*s, 0, 0, v1) < invert_driver(*s, 0, 0, v2));
  }
}

TEST_CASE("extract_bounds: linear closed forms") {
  const DriverBounds b1 = extract_bounds(DriverSpec(LinearDriver{1.0, 3.0}), 1.0);
  CHECK(b1.c_h == 1.0);
  CHECK(b1.c0 == 3.0);
  CHECK(b1.C0 == 4.0);
  const DriverBounds b2 = extract_bounds(DriverSpec(LinearDriver{2.0, 4.0}), 0.0);
  CHECK(b2.c_h == 2.0);
  CHECK(b2.c0 == 2.0);
  CHECK(b2.C0 == 2.0);
}

TEST_CASE("extract_bounds: monotone perturbed vs dense probing oracle") {
  const DriverSpec d = mp_spec(1.0, 2.0, 0.1, 1.0);
  const DriverBounds b = extract_bounds(d, 0.5);
  CHECK(b.c_h == doctest::Approx(0.9).epsilon(1e-15));

  // Brute-force slope minimum over a fine z-lattice.
  double ch_probe = 1e300;
  for (int i = 0; i <= 200000; ++i) {
    const double z = -20.0 + 40.0 * double(i) / 200000.0;
    ch_probe = std::min(ch_probe, h_slope(d, 0, 0, z));
  }
  CHECK(b.c_h <= ch_probe + 1e-10);
  CHECK(std::abs(b.c0 - bisect_oracle(d, 0, 0, 0.0)) <= 1e-10);
  CHECK(std::abs(b.C0 - bisect_oracle(d, 0, 0, 0.5)) <= 1e-10);
}

TEST_CASE("extract_bounds: custom driver probes its lattice") {
  const DriverSpec d = tanh_custom();
  const DriverBounds b = extract_bounds(d, 1.0);
  CHECK(b.c_h > 0.0);
  CHECK(b.c0 > 0.0);
  CHECK(b.c0 <= b.C0);
  // Sandwich: returned roots stay inside the extracted bounds.
  for (double v : {0.0, 0.25, 0.5, 1.0})
    for (double x : {-10.0, 0.0, 10.0}) {
      const double nu = invert_driver(d, 0.5, x, v);
      CHECK(nu >= b.c0 - 1e-10);
      CHECK(nu <= b.C0 + 1e-10);
    }
}

TEST_CASE("check_stability matches the linear example") {
  // Basal convention: c0 = C0 = b/a, so satisfied iff b > 2*m_inf.
  const StabilityReport sat =
      check_stability(extract_bounds(DriverSpec(LinearDriver{1.0, 3.0}), 0.0), 1.0);
  CHECK(sat.satisfied);
  CHECK(sat.gamma == doctest::Approx(1.5));
  const StabilityReport unsat =
      check_stability(extract_bounds(DriverSpec(LinearDriver{1.0, 1.5}), 0.0), 1.0);
  CHECK_FALSE(unsat.satisfied);
  const StabilityReport direct = check_stability(DriverBounds{1.0, 1.0, 1.0}, 0.4);
  CHECK(direct.gamma == doctest::Approx(0.1));
  CHECK(direct.satisfied);
}

TEST_CASE("stability boundary is strict at b = 2*m_inf") {
  const double m = 1.0;
  auto satisfied_at = [&](double b) {
    return check_stability(extract_bounds(DriverSpec(LinearDriver{1.0, b}), 0.0), m).satisfied;
  };
  CHECK(satisfied_at(2.0 * m + 1e-6));
  CHECK_FALSE(satisfied_at(2.0 * m - 1e-6));
  CHECK_FALSE(satisfied_at(2.0 * m));  // gamma == 0 exactly
}

TEST_CASE("bounds sandwich for the inverse") {
  const DriverSpec d(LinearDriver{1.0, 3.0});
  const double m = 0.7;
  const DriverBounds b = extract_bounds(d, m);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uv(0.0, m);
  for (int i = 0; i < 200; ++i) {
    const double nu = invert_driver(d, 0, 0, uv(rng));
    CHECK(nu >= b.c0);
    CHECK(nu <= b.C0);
  }
}

TEST_CASE("construction rejects out-of-contract parameters") {
  CHECK_THROWS_AS(DriverSpec(LinearDriver{-1.0, 2.0}), ValidationError);
  CHECK_THROWS_AS(DriverSpec(LinearDriver{1.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(DriverSpec(MonotonePerturbedDriver{1.0, 2.0, 2.0, 1.0}), ValidationError);
  CustomDriver no_slope;
  no_slope.h = [](double, double, double z) { return z; };
  CHECK_THROWS_AS(DriverSpec(std::move(no_slope)), ValidationError);
  CustomDriver decreasing;
  decreasing.h = [](double, double, double z) { return -z; };
  decreasing.dz_h = [](double, double, double) { return -1.0; };
  CHECK_THROWS_AS(DriverSpec(std::move(decreasing)), ValidationError);
}

TEST_CASE("bracket failure on a non-coercive driver") {
  CustomDriver bounded;
  bounded.h = [](double, double, double z) { return std::tanh(z) - 2.0; };
  bounded.dz_h = [](double, double, double z) {
    const double s = 1.0 / std::cosh(z);
    return std::max(s * s, 1e-30);
  };
  const DriverSpec d(std::move(bounded));
  CHECK_THROWS_AS(invert_driver(d, 0, 0, 0.0), BracketFailure);
}

TEST_CASE("slightly negative v clamps to zero; far negative rejects") {
  const DriverSpec d(LinearDriver{1.0, 2.0});
  CHECK(invert_driver(d, 0, 0, -1e-11) == 2.0);
  CHECK_THROWS_AS(invert_driver(d, 0, 0, -1e-3), ValidationError);
}

TEST_CASE("constant-volatility control driver") {
  const DriverSpec d = constant_volatility_driver(1.5);
  for (double v : {0.0, 0.3, 2.0}) CHECK(invert_driver(d, 0, 0, v) == 1.5);
  const DriverBounds b = extract_bounds(d, 1.0);
  CHECK(b.c0 == doctest::Approx(1.5));
  CHECK(b.C0 == doctest::Approx(1.5));
}

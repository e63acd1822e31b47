#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <vector>

#include "gammaprime/error.hpp"
#include "gammaprime/numerics.hpp"

using namespace gammaprime;

namespace {
const boost::math::normal_distribution<double> std_normal;
}

TEST_CASE("normal_pdf closed form") {
  CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804).epsilon(1e-10));
  CHECK(normal_pdf(2.0) == doctest::Approx(0.05399096651).epsilon(1e-10));
  for (double x = -6.0; x <= 6.0; x += 0.37) {
    CHECK(normal_pdf(x) == normal_pdf(-x));
    CHECK(normal_pdf(x) > 0.0);
    CHECK(std::fabs(normal_pdf(x) - boost::math::pdf(std_normal, x)) < 1e-15);
    CHECK(std::fabs(normal_log_pdf(x) - std::log(normal_pdf(x))) < 1e-12);
  }
}

TEST_CASE("normal_pdf integrates to one on [-8, 8]") {
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [](double x) { return normal_pdf(x); }, -8.0, 8.0, 10, 1e-14);
  CHECK(std::fabs(integral - 1.0) < 1e-8);
}

TEST_CASE("normal_cdf against an independent implementation") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(std::fabs(normal_cdf(1.644853627) - 0.95) < 1e-9);
  double previous = 0.0;
  for (double x = -12.0; x <= 12.0; x += 0.013) {
    const double c = normal_cdf(x);
    CHECK(std::fabs(c - boost::math::cdf(std_normal, x)) <= 1e-10);
    CHECK(std::fabs(c - (1.0 - normal_cdf(-x))) <= 1e-15);
    CHECK(c >= previous);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
    CHECK(std::fabs(normal_sf(x) - normal_cdf(-x)) == 0.0);
    previous = c;
  }
}

TEST_CASE("normal_quantile round-trips and errors") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(normal_quantile(0.95) == doctest::Approx(1.6449).epsilon(5e-5));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.9600).epsilon(5e-5));
  for (double p : {1e-12, 1e-6, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.9, 0.97575, 0.999, 1 - 1e-9}) {
    const double x = normal_quantile(p);
    CHECK(std::fabs(normal_cdf(x) - p) <= 1e-8 * std::max(1.0, p));
    CHECK(std::fabs(x - boost::math::quantile(std_normal, p)) < 1e-8);
  }
  for (double bad : {0.0, 1.0, -0.1, 1.5, std::nan("")}) {
    CHECK_THROWS_AS(normal_quantile(bad), Error);
  }
  try {
    normal_quantile(0.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Domain);
  }
}

TEST_CASE("solve_root examples") {
  const auto f = [](double psi) { return psi * std::tanh(psi) - 1.0; };
  const double root = solve_root(f, RootBracket{1.0, 2.0});
  CHECK(std::fabs(root - 1.19967864) < 1e-8);
  CHECK(std::fabs(f(root)) < 1e-11);

  CHECK(std::fabs(solve_root([](double x) { return x; }, RootBracket{-1.0, 1.0})) <= 1e-12);
  CHECK(std::fabs(solve_root([](double x) { return x * x - 2.0; }, RootBracket{1.0, 2.0}) -
                  std::sqrt(2.0)) <= 1e-12);
}

TEST_CASE("solve_root is bracket independent on psi tanh psi = 1") {
  const auto f = [](double psi) { return psi * std::tanh(psi) - 1.0; };
  const auto df = [](double psi) {
    const double s = 1.0 / std::cosh(psi);
    return std::tanh(psi) + psi * s * s;
  };
  const double reference = solve_root(f, RootBracket{1.0, 2.0});
  for (const auto& b : std::vector<RootBracket>{{0.5, 3.0}, {1.1, 1.3}, {1.19, 5.0}, {0.01, 40.0}}) {
    CHECK(std::fabs(solve_root(f, b) - reference) <= 1e-12);
    CHECK(std::fabs(solve_root(f, b, df) - reference) <= 1e-12);
  }
}

TEST_CASE("solve_root errors") {
  try {
    solve_root([](double x) { return x * x + 1.0; }, RootBracket{-1.0, 1.0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Bracket);
  }
  try {
    solve_root([](double x) { return x; }, RootBracket{-1.0, 1.0, 0.0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Bracket);
  }
  // A jump cannot be narrowed below ~1e-60 in 200 halvings.
  try {
    solve_root([](double x) { return x < 0.3 ? -1.0 : 1.0; }, RootBracket{0.0, 1.0, 1e-300});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Convergence);
  }
}

TEST_CASE("RandomStream determinism and independence") {
  RandomStream a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  bool differs_stream = false, differs_seed = false;
  for (int i = 0; i < 100; ++i) {
    const double ua = a.uniform();
    CHECK(ua == b.uniform());
    CHECK(ua > 0.0);
    CHECK(ua < 1.0);
    if (ua != c.uniform()) differs_stream = true;
    if (ua != d.uniform()) differs_seed = true;
  }
  CHECK(differs_stream);
  CHECK(differs_seed);
}

TEST_CASE("RandomStream uniform moments") {
  RandomStream s(7, 3);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform(0.05, 0.95);
    CHECK(u > 0.05);
    CHECK(u < 0.95);
    sum += u;
    sum2 += u * u;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::fabs(mean - 0.5) < 5.0 * std::sqrt(0.9 * 0.9 / 12.0 / n));
  CHECK(std::fabs(var - 0.9 * 0.9 / 12.0) < 0.002);
}

TEST_CASE("RandomStream normal moments") {
  RandomStream s(11, 0);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s.normal(1.0, 2.0);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  CHECK(std::fabs(mean - 1.0) < 5.0 * 2.0 / std::sqrt(n));
  CHECK(std::fabs(sum2 / n - mean * mean - 4.0) < 0.06);
}

TEST_CASE("RandomStream binomial") {
  RandomStream s(5, 9);
  for (int i = 0; i < 50; ++i) {
    CHECK(s.binomial(25, 0.0) == 0);
    CHECK(s.binomial(25, 1.0) == 25);
    CHECK(s.binomial(0, 0.4) == 0);
  }
  const double big = static_cast<double>(s.binomial(1000000, 0.3));
  CHECK(std::fabs(big - 3e5) <= 4.0 * std::sqrt(1e6 * 0.21));

  const int draws = 100000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) sum += static_cast<double>(s.binomial(40, 0.35));
  const double mean = sum / draws;
  CHECK(std::fabs(mean - 14.0) <= 5.0 * std::sqrt(40 * 0.35 * 0.65 / draws));

  CHECK_THROWS_AS(s.binomial(-1, 0.5), Error);
  CHECK_THROWS_AS(s.binomial(5, 1.5), Error);
}

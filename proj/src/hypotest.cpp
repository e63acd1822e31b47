#include "gammaprime/hypotest.hpp"

#include <cmath>
#include <string>

#include "gammaprime/effects.hpp"
#include "gammaprime/error.hpp"
#include "gammaprime/numerics.hpp"

namespace gammaprime {

TestResult make_test_result(double statistic, TestKind kind) noexcept {
  TestResult r{};
  r.statistic = statistic;
  r.statistic_squared = statistic * statistic;
  r.p_two_sided = 2.0 * normal_sf(std::fabs(statistic));
  r.p_one_sided = normal_sf(statistic);
  r.kind = kind;
  return r;
}

TestResult z_test(const ContingencyTable& table) {
  return make_test_result(log_or(table) / woolf_se(table), TestKind::Z);
}

TestResult t_test(const ContingencyTable& table) {
  const SampleEstimates e = estimates(table);
  const double psi = log_or(table);
  if (!in_monotone_range(psi)) {
    raise(ErrorCode::OutOfRange, "t_test: |log(OR-hat)| = " + std::to_string(std::fabs(psi)) +
                                     " is at or beyond the maximum of gamma");
  }
  const double statistic = std::sqrt(e.n_total) * 4.0 * psi /
                           (e.sigma_hat * (4.0 - psi * std::tanh(psi / 4.0)));
  return make_test_result(statistic, TestKind::T);
}

double zt_ratio(double psi) {
  const double limit = llc_constants().max_log_or;
  if (!(std::fabs(psi) <= limit)) {
    raise(ErrorCode::OutOfRange, "zt_ratio: |log(OR)| beyond the maximum of gamma");
  }
  if (std::fabs(psi) == limit) return 0.0;
  return (4.0 - psi * std::tanh(psi / 4.0)) / 4.0;
}

}  // namespace gammaprime

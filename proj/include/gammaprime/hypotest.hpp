#pragma once

#include "gammaprime/contab.hpp"

namespace gammaprime {

enum class TestKind { Z, T };

struct TestResult {
  double statistic;
  double statistic_squared;
  double p_two_sided;  ///< 2 (1 - Phi(|statistic|)), equivalently the chi2(1) tail of the square
  double p_one_sided;  ///< 1 - Phi(statistic)
  TestKind kind;
};

/// Builds the result (p-values included) for a given statistic.
TestResult make_test_result(double statistic, TestKind kind) noexcept;

/// Classical Wald test: log(OR-hat) / sqrt(sum 1/n_ij).
TestResult z_test(const ContingencyTable& table);

/// Test based on gamma prime:
///   T = sqrt(N) 4 log(OR-hat) / (sigma_hat (4 - log(OR-hat) tanh(log(OR-hat)/4))).
/// Throws OutOfRange when |log(OR-hat)| >= max_log_or.
TestResult t_test(const ContingencyTable& table);

/// Z / T = (4 - psi tanh(psi/4)) / 4, in (0, 1] on the monotone range.
/// Throws OutOfRange when |psi| > max_log_or; returns 0 at the boundary.
double zt_ratio(double psi);

}  // namespace gammaprime

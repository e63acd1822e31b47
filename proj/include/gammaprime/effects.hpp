#pragma once

#include <optional>

#include "gammaprime/contab.hpp"
#include "gammaprime/error.hpp"

namespace gammaprime {

/// Constants tied to the maximum of the standardized log odds ratio.
struct LlcConstants {
  double psi_star;    ///< root of psi * tanh(psi) = 1
  double max_log_or;  ///< 4 * psi_star, where gamma peaks
  double llc;         ///< Laplace Limit Constant, gamma at max_log_or
  double max_or;      ///< exp(max_log_or)
};

/// Solved once (thread-safe) and cached.
const LlcConstants& llc_constants();

/// log(n11 n22 / (n12 n21)). Throws Domain on a zero cell.
double log_or(const ContingencyTable& table);

/// Maximum attainable standardized log(OR): psi / (4 cosh(psi / 4)).
double gamma_of_psi(double psi) noexcept;

/// The same quantity in its unsimplified form
/// psi / (2 sqrt(2 + (1 + e^psi) / e^(psi/2))). Kept as a cross-check.
double gamma_of_psi_unsimplified(double psi) noexcept;

/// d gamma / d psi = (4 - psi tanh(psi/4)) / (16 cosh(psi/4)).
double gamma_derivative(double psi) noexcept;

/// True on the open interval (-max_log_or, max_log_or) where gamma prime is
/// strictly increasing.
bool in_monotone_range(double psi) noexcept;

/// gamma / LLC, in [-1, 1]. Beyond +-max_log_or the value is still returned
/// but the transform is no longer monotone; `warn` is told.
double gamma_prime_of_psi(double psi, const WarningHandler& warn = {});

/// Delta-method standard error of gamma-prime-hat:
///   sigma_hat |sech(psi/4) (4 - psi tanh(psi/4))| / (16 LLC) / sqrt(N).
/// Throws OutOfRange for |psi| >= max_log_or, where the derivative vanishes.
double se_gamma_prime(double psi, double sigma_hat, double n_total);

/// Same, from the standard error of log(OR)-hat (sigma_hat / sqrt(N)).
double se_gamma_prime_from_se(double psi, double se_log_or);

/// Yule's coefficient of colligation (sqrt(OR) - 1) / (sqrt(OR) + 1).
double yule_y(double odds_ratio);
/// Yule's Q, (OR - 1) / (OR + 1).
double yule_q(double odds_ratio);

/// Delta-method sampling variances of Yule's Y and Q.
double var_yule_y(const SampleEstimates& e);
double var_yule_q(const SampleEstimates& e);

/// Exposure probability among controls implied by p = Pr(E|D) and the OR:
/// p / ((1 - p) OR + p).
double q_from_p_or(double p, double odds_ratio);

/// Population 2x2 model in both parameterizations:
/// case-control (w, p, q) and exposure-based (v, Pr(D|E), Pr(D|not E)).
struct ExposureModel {
  double w;
  double p;
  double q;
  double v;
  double pr_d_given_e;
  double pr_d_given_not_e;
  double odds_ratio;
  double risk_ratio;

  /// Builds the model from the case fraction, Pr(E|D) and the OR.
  static ExposureModel from_case_control(double w, double p, double odds_ratio);
  /// Builds the model from Pr(E), Pr(D|E) and the OR.
  static ExposureModel from_exposure(double v, double pr_d_given_e, double odds_ratio);
};

/// sigma from 1/w 1/(p(1-p)) + 1/(1-w) 1/(q(1-q)).
double sigma_population(const ExposureModel& m);
/// sigma from 1/v 1/(Pr(D|E)(1-Pr(D|E))) + 1/(1-v) 1/(Pr(D|~E)(1-Pr(D|~E))).
double sigma_population_exposure(const ExposureModel& m);

/// The sigma-minimizing population at a given OR:
/// Pr(D|E) = 1 - 1/(1 + sqrt(OR)), Pr(D|~E) = 1 - Pr(D|E), v = w = 1/2.
ExposureModel sigma_minimizers(double odds_ratio);

/// Effect measures for one dataset or one published summary.
struct EffectSummary {
  double log_or;
  double se_log_or;
  double gamma;
  double gamma_prime;
  /// Absent when |log_or| >= max_log_or.
  std::optional<double> se_gamma_prime;
  double yule_y;
  double yule_q;
  /// Absent when built from a published summary.
  std::optional<double> n_total;
};

EffectSummary summarize(const ContingencyTable& table, const WarningHandler& warn = {});
EffectSummary summarize(double log_or, double se_log_or, const WarningHandler& warn = {});

}  // namespace gammaprime

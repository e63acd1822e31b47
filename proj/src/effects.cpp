#include "gammaprime/effects.hpp"

#include <cmath>
#include <string>

#include "gammaprime/numerics.hpp"

namespace gammaprime {

namespace {

bool open_unit(double x) { return x > 0.0 && x < 1.0; }

void require_probability(double x, const char* what) {
  if (!open_unit(x)) {
    raise(ErrorCode::Domain, std::string(what) + " must lie strictly inside (0, 1)");
  }
}

void require_odds_ratio(double odds_ratio) {
  if (!(odds_ratio > 0.0) || !std::isfinite(odds_ratio)) {
    raise(ErrorCode::Domain, "odds ratio must be positive and finite");
  }
}

LlcConstants solve_constants() {
  const auto f = [](double psi) { return psi * std::tanh(psi) - 1.0; };
  const auto df = [](double psi) {
    const double sech = 1.0 / std::cosh(psi);
    return std::tanh(psi) + psi * sech * sech;
  };
  LlcConstants c{};
  c.psi_star = solve_root(f, RootBracket{1.0, 2.0, 1e-15}, df);
  c.max_log_or = 4.0 * c.psi_star;
  c.llc = c.max_log_or / (4.0 * std::cosh(c.psi_star));
  c.max_or = std::exp(c.max_log_or);
  return c;
}

}  // namespace

const LlcConstants& llc_constants() {
  static const LlcConstants constants = solve_constants();
  return constants;
}

double log_or(const ContingencyTable& table) {
  if (!table.strictly_positive()) {
    raise(ErrorCode::Domain, "log_or: zero cell; apply the Haldane-Anscombe correction first");
  }
  return std::log(table.n11()) + std::log(table.n22()) - std::log(table.n12()) -
         std::log(table.n21());
}

double gamma_of_psi(double psi) noexcept { return psi / (4.0 * std::cosh(psi / 4.0)); }

double gamma_of_psi_unsimplified(double psi) noexcept {
  return psi / (2.0 * std::sqrt(2.0 + (1.0 + std::exp(psi)) / std::exp(psi / 2.0)));
}

double gamma_derivative(double psi) noexcept {
  return (4.0 - psi * std::tanh(psi / 4.0)) / (16.0 * std::cosh(psi / 4.0));
}

bool in_monotone_range(double psi) noexcept {
  return std::fabs(psi) < llc_constants().max_log_or;
}

double gamma_prime_of_psi(double psi, const WarningHandler& warn) {
  const auto& c = llc_constants();
  if (warn && std::fabs(psi) > c.max_log_or) {
    warn("log(OR) = " + std::to_string(psi) +
         " lies beyond the maximum of gamma; gamma prime is not monotone there");
  }
  return gamma_of_psi(psi) / c.llc;
}

double se_gamma_prime_from_se(double psi, double se_log_or) {
  if (!(se_log_or > 0.0) || !std::isfinite(se_log_or)) {
    raise(ErrorCode::Domain, "se_gamma_prime: standard error must be positive");
  }
  const auto& c = llc_constants();
  if (!(std::fabs(psi) < c.max_log_or)) {
    raise(ErrorCode::OutOfRange,
          "se_gamma_prime: |log(OR)| >= " + std::to_string(c.max_log_or) +
              ", where the derivative of gamma vanishes");
  }
  const double slope =
      std::fabs((4.0 - psi * std::tanh(psi / 4.0)) / std::cosh(psi / 4.0)) / (16.0 * c.llc);
  return se_log_or * slope;
}

double se_gamma_prime(double psi, double sigma_hat, double n_total) {
  if (!(sigma_hat > 0.0) || !(n_total > 0.0)) {
    raise(ErrorCode::Domain, "se_gamma_prime: sigma_hat and N must be positive");
  }
  return se_gamma_prime_from_se(psi, sigma_hat / std::sqrt(n_total));
}

double yule_y(double odds_ratio) {
  require_odds_ratio(odds_ratio);
  const double root = std::sqrt(odds_ratio);
  return (root - 1.0) / (root + 1.0);
}

double yule_q(double odds_ratio) {
  require_odds_ratio(odds_ratio);
  return (odds_ratio - 1.0) / (odds_ratio + 1.0);
}

// Both variances pair the case-row term (exposure p among cases) with 1/w,
// matching sigma_hat^2 = 1/w 1/(p(1-p)) + 1/(1-w) 1/(q(1-q)).
double var_yule_y(const SampleEstimates& e) {
  const double p = e.p_hat, q = e.q_hat, w = e.w_hat;
  const double k = std::pow(std::sqrt(p * (1.0 - q) / ((1.0 - p) * q)) + 1.0, 4);
  const double cases = (1.0 - q) / (w * (1.0 - p) * (1.0 - p) * q * k);
  const double controls = p / ((1.0 - w) * (1.0 - p) * q * q * k);
  return (cases + controls) / e.n_total;
}

double var_yule_q(const SampleEstimates& e) {
  const double p = e.p_hat, q = e.q_hat, w = e.w_hat;
  const double d4 = std::pow(p + q - 2.0 * p * q, 4);
  const double cases = 4.0 * (1.0 - p) * p * (1.0 - q) * (1.0 - q) * q * q / (w * d4);
  const double controls = 4.0 * (1.0 - p) * (1.0 - p) * p * p * (1.0 - q) * q / ((1.0 - w) * d4);
  return (cases + controls) / e.n_total;
}

double q_from_p_or(double p, double odds_ratio) {
  require_probability(p, "p");
  require_odds_ratio(odds_ratio);
  return p / ((1.0 - p) * odds_ratio + p);
}

ExposureModel ExposureModel::from_case_control(double w, double p, double odds_ratio) {
  require_probability(w, "w");
  ExposureModel m{};
  m.w = w;
  m.p = p;
  m.q = q_from_p_or(p, odds_ratio);
  m.odds_ratio = odds_ratio;
  m.v = w * p + (1.0 - w) * m.q;
  m.pr_d_given_e = w * p / m.v;
  m.pr_d_given_not_e = w * (1.0 - p) / (1.0 - m.v);
  m.risk_ratio = m.pr_d_given_e / m.pr_d_given_not_e;
  require_probability(m.q, "q");
  require_probability(m.v, "v");
  return m;
}

ExposureModel ExposureModel::from_exposure(double v, double pr_d_given_e, double odds_ratio) {
  require_probability(v, "v");
  require_probability(pr_d_given_e, "Pr(D|E)");
  require_odds_ratio(odds_ratio);
  ExposureModel m{};
  m.v = v;
  m.odds_ratio = odds_ratio;
  m.pr_d_given_e = pr_d_given_e;
  m.pr_d_given_not_e = 1.0 / (1.0 - odds_ratio * (1.0 - 1.0 / pr_d_given_e));
  m.w = v * m.pr_d_given_e + (1.0 - v) * m.pr_d_given_not_e;
  m.p = v * m.pr_d_given_e / m.w;
  m.q = v * (1.0 - m.pr_d_given_e) / (1.0 - m.w);
  m.risk_ratio = m.pr_d_given_e / m.pr_d_given_not_e;
  require_probability(m.pr_d_given_not_e, "Pr(D|not E)");
  require_probability(m.w, "w");
  return m;
}

double sigma_population(const ExposureModel& m) {
  require_probability(m.w, "w");
  require_probability(m.p, "p");
  require_probability(m.q, "q");
  return std::sqrt(1.0 / m.w / (m.p * (1.0 - m.p)) +
                   1.0 / (1.0 - m.w) / (m.q * (1.0 - m.q)));
}

double sigma_population_exposure(const ExposureModel& m) {
  require_probability(m.v, "v");
  require_probability(m.pr_d_given_e, "Pr(D|E)");
  require_probability(m.pr_d_given_not_e, "Pr(D|not E)");
  const double a = m.pr_d_given_e, b = m.pr_d_given_not_e;
  return std::sqrt(1.0 / m.v / (a * (1.0 - a)) + 1.0 / (1.0 - m.v) / (b * (1.0 - b)));
}

ExposureModel sigma_minimizers(double odds_ratio) {
  require_odds_ratio(odds_ratio);
  const double pr_d_given_e = 1.0 - 1.0 / (1.0 + std::sqrt(odds_ratio));
  return ExposureModel::from_exposure(0.5, pr_d_given_e, odds_ratio);
}

EffectSummary summarize(double log_or_value, double se_log_or, const WarningHandler& warn) {
  if (!std::isfinite(log_or_value)) raise(ErrorCode::Domain, "log(OR) must be finite");
  if (!(se_log_or > 0.0) || !std::isfinite(se_log_or)) {
    raise(ErrorCode::Domain, "standard error of log(OR) must be positive");
  }
  EffectSummary s{};
  s.log_or = log_or_value;
  s.se_log_or = se_log_or;
  s.gamma = gamma_of_psi(log_or_value);
  s.gamma_prime = gamma_prime_of_psi(log_or_value, warn);
  if (in_monotone_range(log_or_value)) {
    s.se_gamma_prime = se_gamma_prime_from_se(log_or_value, se_log_or);
  }
  s.yule_y = std::tanh(log_or_value / 4.0);
  s.yule_q = std::tanh(log_or_value / 2.0);
  return s;
}

EffectSummary summarize(const ContingencyTable& table, const WarningHandler& warn) {
  const SampleEstimates e = estimates(table);
  EffectSummary s = summarize(log_or(table), woolf_se(table), warn);
  s.n_total = e.n_total;
  return s;
}

}  // namespace gammaprime

#include "gammaprime/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "gammaprime/effects.hpp"
#include "gammaprime/numerics.hpp"
#include "text.hpp"

namespace gammaprime {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) noexcept {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::fabs(a - b)));
}

double log_statistic_density(double observed, double xi, Sided sided) noexcept {
  const double direct = normal_log_pdf(observed - xi);
  if (sided == Sided::One) return direct;
  return log_add_exp(direct, normal_log_pdf(observed + xi));
}

void require_se(double se) {
  if (!(se > 0.0) || !std::isfinite(se)) {
    raise(ErrorCode::Domain, "standard error must be positive and finite");
  }
}

double to_scale(double psi, Scale scale) {
  if (scale == Scale::LogOr) return psi;
  const double limit = llc_constants().max_log_or;
  return gamma_prime_of_psi(std::clamp(psi, -limit, limit));
}

}  // namespace

BinnedPrior BinnedPrior::from_bins(std::vector<PriorBin> bins, double sum_tolerance) {
  if (bins.empty()) raise(ErrorCode::Domain, "prior needs at least one bin");
  double total = 0.0;
  int at_zero = 0;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    const PriorBin& b = bins[i];
    if (!std::isfinite(b.probability) || b.probability < 0.0) {
      raise(ErrorCode::Domain, "prior probabilities must be finite and nonnegative");
    }
    if (!std::isfinite(b.midpoint) || !(b.lower <= b.midpoint && b.midpoint <= b.upper)) {
      raise(ErrorCode::Domain, "prior bin midpoint must lie within its edges");
    }
    if (i > 0 && !(b.midpoint > bins[i - 1].midpoint)) {
      raise(ErrorCode::Domain, "prior midpoints must be strictly increasing");
    }
    if (b.midpoint == 0.0) ++at_zero;
    total += b.probability;
  }
  if (at_zero > 1) raise(ErrorCode::Domain, "at most one prior bin may sit at zero");
  if (std::fabs(total - 1.0) > sum_tolerance) {
    raise(ErrorCode::Domain, "prior probabilities sum to " + text::format_number(total) +
                                 ", expected 1");
  }
  for (PriorBin& b : bins) b.probability /= total;
  return BinnedPrior(std::move(bins));
}

BinnedPrior BinnedPrior::from_midpoints(std::span<const double> midpoints,
                                        std::span<const double> probabilities,
                                        double null_mass, double sum_tolerance) {
  if (midpoints.size() != probabilities.size()) {
    raise(ErrorCode::Domain, "prior midpoints and probabilities differ in length");
  }
  if (!(null_mass >= 0.0 && null_mass <= 1.0)) {
    raise(ErrorCode::Domain, "null mass must lie in [0, 1]");
  }
  const std::size_t n = midpoints.size();
  std::vector<PriorBin> bins;
  bins.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double m = midpoints[i];
    double lower = m, upper = m;
    if (n > 1) {
      const double left_gap = i > 0 ? m - midpoints[i - 1] : midpoints[1] - midpoints[0];
      const double right_gap = i + 1 < n ? midpoints[i + 1] - m : m - midpoints[n - 2];
      lower = m - 0.5 * left_gap;
      upper = m + 0.5 * right_gap;
    }
    bins.push_back(PriorBin{m, probabilities[i], lower, upper});
  }
  if (null_mass > 0.0) {
    const auto pos = std::lower_bound(bins.begin(), bins.end(), 0.0,
                                      [](const PriorBin& b, double v) { return b.midpoint < v; });
    bins.insert(pos, PriorBin{0.0, null_mass, 0.0, 0.0});
  }
  return from_bins(std::move(bins), sum_tolerance);
}

std::vector<double> BinnedPrior::midpoints() const {
  std::vector<double> out;
  out.reserve(bins_.size());
  for (const auto& b : bins_) out.push_back(b.midpoint);
  return out;
}

std::vector<double> BinnedPrior::probabilities() const {
  std::vector<double> out;
  out.reserve(bins_.size());
  for (const auto& b : bins_) out.push_back(b.probability);
  return out;
}

double BinnedPrior::null_mass() const noexcept {
  for (const auto& b : bins_) {
    if (b.point_mass() && b.midpoint == 0.0) return b.probability;
  }
  return 0.0;
}

double BinnedPrior::nominal_width() const noexcept {
  std::vector<double> widths;
  for (const auto& b : bins_) {
    if (!b.point_mass()) widths.push_back(b.upper - b.lower);
  }
  if (widths.empty()) return 0.0;
  const auto mid = widths.begin() + static_cast<std::ptrdiff_t>(widths.size() / 2);
  std::nth_element(widths.begin(), mid, widths.end());
  return *mid;
}

BinnedPrior make_default_prior(double pi0, double tau, double truncation, int bins) {
  if (!(pi0 >= 0.0 && pi0 <= 1.0)) raise(ErrorCode::Domain, "pi0 must lie in [0, 1]");
  if (!(tau > 0.0) || !std::isfinite(tau)) raise(ErrorCode::Domain, "tau must be positive");
  if (!(truncation > 0.0) || !std::isfinite(truncation)) {
    raise(ErrorCode::Domain, "truncation must be positive");
  }
  if (bins < 2) raise(ErrorCode::Domain, "the default prior needs at least two bins");
  if (pi0 == 1.0) return BinnedPrior::from_bins({PriorBin{0.0, 1.0, 0.0, 0.0}});
  if (pi0 > 0.0 && bins % 2 != 0) {
    raise(ErrorCode::Domain, "an odd bin count centres a bin on the null; use an even count");
  }

  std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
  for (int k = 0; k <= bins; ++k) {
    edges[static_cast<std::size_t>(k)] = truncation * static_cast<double>(2 * k - bins) / bins;
  }
  std::vector<PriorBin> out;
  out.reserve(static_cast<std::size_t>(bins) + 1);
  double mass = 0.0;
  for (int k = 0; k < bins; ++k) {
    const double lo = edges[static_cast<std::size_t>(k)];
    const double hi = edges[static_cast<std::size_t>(k) + 1];
    // Difference of the lower tails left of zero and of the upper tails
    // right of it keeps the outer bins accurate.
    const double p = hi <= 0.0 ? normal_cdf(hi / tau) - normal_cdf(lo / tau)
                               : normal_sf(lo / tau) - normal_sf(hi / tau);
    out.push_back(PriorBin{0.5 * (lo + hi), p, lo, hi});
    mass += p;
  }
  for (PriorBin& b : out) b.probability *= (1.0 - pi0) / mass;
  if (pi0 > 0.0) {
    const auto pos = out.begin() + bins / 2;
    out.insert(pos, PriorBin{0.0, pi0, 0.0, 0.0});
  }
  return BinnedPrior::from_bins(std::move(out));
}

BinnedPrior parse_prior_csv(std::string_view content) {
  std::vector<double> midpoints, probabilities;
  double null_mass = 0.0;
  bool header_seen = false;
  bool data_seen = false;
  std::size_t line_no = 0;
  for (std::string_view raw : text::lines(content)) {
    ++line_no;
    const std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto fields = text::split_fields(line);
    if (!header_seen) {
      if (fields.size() != 2 || fields[0] != "midpoint" || fields[1] != "probability") {
        raise(ErrorCode::Parse, "prior file line " + std::to_string(line_no) +
                                    ": expected header `midpoint,probability`");
      }
      header_seen = true;
      continue;
    }
    double m = 0.0, p = 0.0;
    if (fields.size() != 2 || !text::parse_double(fields[0], m) ||
        !text::parse_double(fields[1], p)) {
      raise(ErrorCode::Parse, "prior file line " + std::to_string(line_no) +
                                  ": expected two numbers `midpoint,probability`");
    }
    const bool first_row = !data_seen;
    data_seen = true;
    if (first_row && m == 0.0) {
      null_mass = p;  // a leading `0,<pi0>` row is the null mass
      continue;
    }
    midpoints.push_back(m);
    probabilities.push_back(p);
  }
  if (!header_seen) raise(ErrorCode::Parse, "prior file is empty");
  if (midpoints.empty()) {
    if (null_mass <= 0.0) raise(ErrorCode::Parse, "prior file has no bins");
    return BinnedPrior::from_bins({PriorBin{0.0, null_mass, 0.0, 0.0}}, 1e-6);
  }
  return BinnedPrior::from_midpoints(midpoints, probabilities, null_mass, 1e-6);
}

BinnedPrior load_prior_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot open prior file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_prior_csv(buffer.str());
}

std::vector<double> dress(const BinnedPrior& prior, double se) {
  require_se(se);
  std::vector<double> xi;
  xi.reserve(prior.size());
  for (const auto& b : prior.bins()) xi.push_back(b.midpoint / se);
  return xi;
}

std::vector<double> dress(const BinnedPrior& prior, double sigma_hat, double n_total) {
  if (!(sigma_hat > 0.0) || !(n_total > 0.0)) {
    raise(ErrorCode::Domain, "dress: sigma_hat and N must be positive");
  }
  std::vector<double> xi;
  xi.reserve(prior.size());
  const double root_n = std::sqrt(n_total);
  for (const auto& b : prior.bins()) xi.push_back(root_n * b.midpoint / sigma_hat);
  return xi;
}

double statistic_density(double observed, double xi, Sided sided) noexcept {
  return std::exp(log_statistic_density(observed, xi, sided));
}

std::vector<double> posterior_weights(const BinnedPrior& prior, std::span<const double> xi,
                                      double observed, Sided sided) {
  if (xi.size() != prior.size()) {
    raise(ErrorCode::Domain, "posterior_weights: noncentralities do not match the prior bins");
  }
  if (!std::isfinite(observed)) raise(ErrorCode::Domain, "observed statistic must be finite");

  std::vector<double> log_w(prior.size());
  double top = kNegInf;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    const double p = prior.bins()[i].probability;
    double lw = p > 0.0 ? std::log(p) + log_statistic_density(observed, xi[i], sided) : kNegInf;
    if (std::isnan(lw)) lw = kNegInf;
    log_w[i] = lw;
    top = std::max(top, lw);
  }
  if (!std::isfinite(top)) {
    raise(ErrorCode::Underflow,
          "posterior_weights: every bin has zero likelihood; widen the prior or rescale");
  }
  double total = 0.0;
  for (double& lw : log_w) {
    lw = std::exp(lw - top);
    total += lw;
  }
  for (double& w : log_w) w /= total;
  return log_w;
}

PosteriorResult undress(const BinnedPrior& prior, std::span<const double> weights,
                        double se_target, Scale scale) {
  if (weights.size() != prior.size()) {
    raise(ErrorCode::Domain, "undress: weights do not match the prior bins");
  }
  if (scale == Scale::GammaPrime) {
    for (const auto& b : prior.bins()) {
      if (!in_monotone_range(b.midpoint)) {
        raise(ErrorCode::OutOfRange,
              "undress: prior bin at log(OR) = " + text::format_number(b.midpoint) +
                  " lies beyond the range where gamma prime is monotone");
      }
    }
  }
  PosteriorResult r;
  r.scale = scale;
  r.se_used = se_target;
  r.weights.assign(weights.begin(), weights.end());
  double mean = 0.0;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    const PriorBin& b = prior.bins()[i];
    r.support.push_back(to_scale(b.midpoint, scale));
    r.lower.push_back(b.point_mass() ? r.support.back() : to_scale(b.lower, scale));
    r.upper.push_back(b.point_mass() ? r.support.back() : to_scale(b.upper, scale));
    mean += r.support.back() * weights[i];
  }
  r.mean = mean;
  return r;
}

std::pair<double, double> hpd_interval(const PosteriorResult& result, double credibility) {
  if (!(credibility > 0.0 && credibility < 1.0)) {
    raise(ErrorCode::Domain, "credibility must lie in (0, 1)");
  }
  const std::size_t n = result.support.size();
  if (n == 0) raise(ErrorCode::Domain, "hpd_interval: empty posterior");

  // Width a point mass is ranked with: the median regular width on this scale.
  std::vector<double> widths;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = result.upper[i] - result.lower[i];
    if (w > 0.0) widths.push_back(w);
  }
  double point_width = 1.0;
  if (!widths.empty()) {
    const auto mid = widths.begin() + static_cast<std::ptrdiff_t>(widths.size() / 2);
    std::nth_element(widths.begin(), mid, widths.end());
    point_width = *mid;
  }

  std::vector<double> density(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = result.upper[i] - result.lower[i];
    density[i] = result.weights[i] / (w > 0.0 ? w : point_width);
  }
  const std::size_t mode = static_cast<std::size_t>(
      std::max_element(result.weights.begin(), result.weights.end()) - result.weights.begin());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (density[a] != density[b]) return density[a] > density[b];
    return std::fabs(result.support[a] - result.support[mode]) <
           std::fabs(result.support[b] - result.support[mode]);
  });

  double covered = 0.0;
  double low = std::numeric_limits<double>::infinity();
  double high = -std::numeric_limits<double>::infinity();
  for (std::size_t idx : order) {
    covered += result.weights[idx];
    low = std::min(low, result.lower[idx]);
    high = std::max(high, result.upper[idx]);
    if (covered >= credibility - 1e-12) break;
  }
  return {low, high};
}

PosteriorResult infer_posterior(const BinnedPrior& prior, double observed, double se,
                                Sided sided, Scale scale, double credibility) {
  const std::vector<double> xi = dress(prior, se);
  const std::vector<double> w = posterior_weights(prior, xi, observed, sided);
  PosteriorResult r = undress(prior, w, se, scale);
  r.observed_statistic = observed;
  r.credibility = credibility;
  std::tie(r.hpd_low, r.hpd_high) = hpd_interval(r, credibility);
  return r;
}

double summary_to_se(double or_point, double ci_low, double ci_high, double level,
                     const WarningHandler& warn) {
  if (!(ci_low > 0.0 && ci_low <= or_point && or_point <= ci_high) || !std::isfinite(ci_high)) {
    raise(ErrorCode::Domain, "summary requires 0 < ci_low <= or <= ci_high");
  }
  if (!(level > 0.0 && level < 1.0)) raise(ErrorCode::Domain, "ci level must lie in (0, 1)");
  const double log_lo = std::log(ci_low), log_hi = std::log(ci_high);
  const double se = (log_hi - log_lo) / (2.0 * normal_quantile(0.5 * (1.0 + level)));
  const double half = 0.5 * (log_hi - log_lo);
  if (warn && half > 0.0 && std::fabs(std::log(or_point) - 0.5 * (log_lo + log_hi)) > 0.1 * half) {
    warn("confidence interval is not symmetric about log(OR) on the log scale");
  }
  return se;
}

}  // namespace gammaprime

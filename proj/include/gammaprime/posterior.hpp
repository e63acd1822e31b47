#pragma once

#include <filesystem>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "gammaprime/error.hpp"

namespace gammaprime {

/// Scale on which a posterior is reported.
enum class Scale { LogOr, GammaPrime };

/// One-sided: the signed statistic T ~ Normal(xi, 1).
/// Two-sided: |T| with the folded-normal density phi(t - xi) + phi(t + xi),
/// the 1-df noncentral chi-square written in terms of |T|.
enum class Sided { One, Two };

/// A bin of a discretized prior on the raw log(OR) scale. A point mass has
/// lower == upper == midpoint.
struct PriorBin {
  double midpoint;
  double probability;
  double lower;
  double upper;

  bool point_mass() const noexcept { return lower == upper; }
};

/// Discrete prior over raw effect sizes: bins with strictly increasing
/// midpoints, probabilities summing to one, and at most one bin at zero
/// (the null mass pi0).
class BinnedPrior {
 public:
  /// Validates and adopts the bins. Throws Domain on negative or non-finite
  /// probabilities, a sum outside 1 +- `sum_tolerance`, non-increasing
  /// midpoints, or a midpoint outside its edges. Probabilities are
  /// renormalized to sum to exactly one.
  static BinnedPrior from_bins(std::vector<PriorBin> bins, double sum_tolerance = 1e-9);

  /// Regular bins given by their midpoints (strictly increasing); edges sit
  /// halfway between neighbours and the outer bins are symmetric about
  /// their midpoints. `null_mass`, when positive, adds a point mass at zero.
  static BinnedPrior from_midpoints(std::span<const double> midpoints,
                                    std::span<const double> probabilities,
                                    double null_mass = 0.0, double sum_tolerance = 1e-9);

  const std::vector<PriorBin>& bins() const noexcept { return bins_; }
  std::size_t size() const noexcept { return bins_.size(); }
  std::vector<double> midpoints() const;
  std::vector<double> probabilities() const;
  /// Probability of the point mass at zero, or 0 when there is none.
  double null_mass() const noexcept;
  /// Median width of the regular (non point-mass) bins; 0 if there are none.
  double nominal_width() const noexcept;

 private:
  explicit BinnedPrior(std::vector<PriorBin> bins) : bins_(std::move(bins)) {}
  std::vector<PriorBin> bins_;
};

/// pi0 at zero plus (1 - pi0) spread over `bins` equal-width bins on
/// [-truncation, truncation], each weighted by its Normal(0, tau) mass.
/// `bins` must be even when 0 < pi0 < 1 so that no regular bin is centred
/// on the null. pi0 = 1 yields the single point mass.
BinnedPrior make_default_prior(double pi0, double tau, double truncation, int bins);

/// Prior file: header `midpoint,probability`; an optional first data row
/// `0,<pi0>` is the null mass. Probabilities must sum to 1 within 1e-6.
/// Blank lines and lines starting with '#' are skipped.
BinnedPrior parse_prior_csv(std::string_view text);
BinnedPrior load_prior_file(const std::filesystem::path& path);

/// Noncentralities xi_i = mu_i / SE.
std::vector<double> dress(const BinnedPrior& prior, double se);
/// Same via sqrt(N) mu_i / sigma_hat.
std::vector<double> dress(const BinnedPrior& prior, double sigma_hat, double n_total);

/// Density of the observed statistic given noncentrality xi.
double statistic_density(double observed, double xi, Sided sided) noexcept;

/// Posterior mixture weights Pr(mu_j) f(t | xi_j) / sum_i Pr(mu_i) f(t | xi_i),
/// accumulated in log space. Throws Underflow when no bin has a
/// representable likelihood.
std::vector<double> posterior_weights(const BinnedPrior& prior, std::span<const double> xi,
                                      double observed, Sided sided);

struct PosteriorResult {
  Scale scale = Scale::LogOr;
  std::vector<double> support;  ///< bin midpoints on `scale`
  std::vector<double> weights;
  std::vector<double> lower;    ///< bin edges on `scale`
  std::vector<double> upper;
  double mean = 0.0;
  double hpd_low = 0.0;
  double hpd_high = 0.0;
  double credibility = 0.0;
  double observed_statistic = 0.0;
  double se_used = 0.0;
};

/// Maps posterior weights back to the raw scale. On the gamma-prime scale
/// each midpoint is transformed; edges beyond the maximum of gamma are
/// clamped to +-1. Throws OutOfRange if a midpoint lies beyond it.
PosteriorResult undress(const BinnedPrior& prior, std::span<const double> weights,
                        double se_target, Scale scale);

/// Highest-posterior-density interval on a discrete support. Bins enter in
/// decreasing order of mass per unit width (on the result's scale) until
/// the covered mass reaches `credibility`; the interval spans the edges of
/// the included bins. A point mass is ranked as if it were as wide as the
/// median regular bin on that scale, but contributes no width itself.
std::pair<double, double> hpd_interval(const PosteriorResult& result, double credibility);

/// dress -> posterior_weights -> undress -> hpd_interval.
PosteriorResult infer_posterior(const BinnedPrior& prior, double observed, double se,
                                Sided sided, Scale scale, double credibility);

/// Standard error of log(OR) recovered from a published odds ratio and its
/// confidence interval. `warn` hears about intervals that are not
/// symmetric about log(or_point) on the log scale.
double summary_to_se(double or_point, double ci_low, double ci_high, double level,
                     const WarningHandler& warn = {});

}  // namespace gammaprime

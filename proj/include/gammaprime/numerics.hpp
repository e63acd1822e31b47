#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>

namespace gammaprime {

/// Standard normal density.
double normal_pdf(double x) noexcept;

/// log of the standard normal density; finite for every finite x.
double normal_log_pdf(double x) noexcept;

/// Standard normal distribution function, accurate in both tails.
double normal_cdf(double x) noexcept;

/// Upper tail 1 - normal_cdf(x) without cancellation.
double normal_sf(double x) noexcept;

/// Inverse of normal_cdf (Wichura's AS 241, about 1e-16 relative accuracy).
/// Throws ErrorCode::Domain unless 0 < p < 1.
double normal_quantile(double p);

struct RootBracket {
  double lo;
  double hi;
  double tolerance = 1e-12;
};

inline constexpr int kRootIterationCap = 200;

/// Bracketed root search. Bisection guarantees progress; when a derivative
/// is supplied, Newton steps that land strictly inside the current bracket
/// are taken instead. Deterministic for a given bracket.
///
/// Throws ErrorCode::Bracket when f does not change sign on [lo, hi] (or the
/// bracket itself is malformed) and ErrorCode::Convergence when the
/// iteration cap is reached first.
double solve_root(const std::function<double(double)>& f, RootBracket bracket,
                  const std::function<double(double)>& derivative = {});

/// xoshiro256** keyed by (seed, stream id) through SplitMix64. Distinct keys
/// give statistically independent streams, so every Monte Carlo replicate can
/// own its own generator and results do not depend on scheduling.
///
/// Satisfies UniformRandomBitGenerator. A stream must not be shared between
/// threads.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  /// Uniform on (lo, hi).
  double uniform(double lo, double hi) noexcept;
  /// Normal(mean, sd) by inversion.
  double normal(double mean, double sd);
  std::int64_t binomial(std::int64_t n, double p);

 private:
  std::array<std::uint64_t, 4> state_;
};

}  // namespace gammaprime

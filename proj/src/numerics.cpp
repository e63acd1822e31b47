#include "gammaprime/numerics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "gammaprime/error.hpp"

namespace gammaprime {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double poly(const double* c, int n, double x) {
  double acc = c[n - 1];
  for (int i = n - 2; i >= 0; --i) acc = acc * x + c[i];
  return acc;
}

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

double normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_log_pdf(double x) noexcept { return -0.5 * x * x - kLogSqrt2Pi; }

double normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_sf(double x) noexcept {
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    raise(ErrorCode::Domain,
          "normal_quantile: probability must lie in (0, 1), got " + std::to_string(p));
  }
  static constexpr double a[] = {3.387132872796366608,  133.14166789178437745,
                                 1971.5909503065514427, 13731.693765509461125,
                                 45921.953931549871457, 67265.770927008700853,
                                 33430.575583588128105, 2509.0809287301226727};
  static constexpr double b[] = {1.0,
                                 42.313330701600911252, 687.1870074920579083,
                                 5394.1960214247511077, 21213.794301586595867,
                                 39307.89580009271061,  28729.085735721942674,
                                 5226.495278852545925};
  static constexpr double c[] = {1.42343711074968357734,  4.6303378461565452959,
                                 5.7694972214606914055,   3.64784832476320460504,
                                 1.27045825245236838258,  0.24178072517745061177,
                                 0.0227238449892691845833, 7.7454501427834140764e-4};
  static constexpr double d[] = {1.0,
                                 2.05319162663775882187,  1.6763848301838038494,
                                 0.68976733498510000455,  0.14810397642748007459,
                                 0.0151986665636164571966, 5.475938084995344946e-4,
                                 1.05075007164441684324e-9};
  static constexpr double e[] = {6.6579046435011037772,    5.4637849111641143699,
                                 1.7848265399172913358,    0.29656057182850489123,
                                 0.026532189526576123093,  0.0012426609473880784386,
                                 2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double f[] = {1.0,
                                 0.59983220655588793769,   0.13692988092273580531,
                                 0.0148753612908506148525, 7.868691311456132591e-4,
                                 1.8463183175100546818e-5, 1.4215117583164458887e-7,
                                 2.04426310338993978564e-15};

  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * poly(a, 8, r) / poly(b, 8, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = poly(c, 8, r) / poly(d, 8, r);
  } else {
    r -= 5.0;
    x = poly(e, 8, r) / poly(f, 8, r);
  }
  return q < 0.0 ? -x : x;
}

double solve_root(const std::function<double(double)>& f, RootBracket bracket,
                  const std::function<double(double)>& derivative) {
  double lo = bracket.lo;
  double hi = bracket.hi;
  if (!(lo < hi) || !(bracket.tolerance > 0.0)) {
    raise(ErrorCode::Bracket, "solve_root: bracket requires lo < hi and tolerance > 0");
  }
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (std::signbit(f_lo) == std::signbit(f_hi) || std::isnan(f_lo) || std::isnan(f_hi)) {
    raise(ErrorCode::Bracket, "solve_root: function does not change sign on the bracket");
  }

  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < kRootIterationCap; ++iter) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (std::signbit(fx) == std::signbit(f_lo)) {
      lo = x;
      f_lo = fx;
    } else {
      hi = x;
    }
    if (hi - lo <= bracket.tolerance) return 0.5 * (lo + hi);

    double next = 0.5 * (lo + hi);
    if (derivative) {
      const double slope = derivative(x);
      if (slope != 0.0 && std::isfinite(slope)) {
        const double newton = x - fx / slope;
        if (newton > lo && newton < hi) {
          if (std::fabs(newton - x) <= 0.5 * bracket.tolerance) return newton;
          next = newton;
        }
      }
    }
    x = next;
  }
  raise(ErrorCode::Convergence, "solve_root: iteration cap reached before tolerance");
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept {
  std::uint64_t key = seed;
  const std::uint64_t mixed_seed = splitmix64(key);
  key = mixed_seed ^ (stream_id * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL);
  for (auto& word : state_) word = splitmix64(key);
}

RandomStream::result_type RandomStream::operator()() noexcept {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RandomStream::uniform() noexcept {
  // 53 random bits centred in their cell: never 0, never 1.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) noexcept {
  return lo + (hi - lo) * uniform();
}

double RandomStream::normal(double mean, double sd) {
  return mean + sd * normal_quantile(uniform());
}

std::int64_t RandomStream::binomial(std::int64_t n, double p) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) {
    raise(ErrorCode::Domain, "binomial: requires n >= 0 and p in [0, 1]");
  }
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  std::binomial_distribution<std::int64_t> dist(n, p);
  return dist(*this);
}

}  // namespace gammaprime

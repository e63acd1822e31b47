// Acceptance gate: prints one "criterion N: PASS|FAIL" line per criterion.
// Usage: acceptance [--only N]

#include <sys/wait.h>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bundled_data.hpp"
#include "gammaprime/contab.hpp"
#include "gammaprime/effects.hpp"
#include "gammaprime/hypotest.hpp"
#include "gammaprime/mcstudy.hpp"
#include "gammaprime/posterior.hpp"
#include "text.hpp"

using namespace gammaprime;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Collects sub-check outcomes and prints the failing ones.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (!ok) {
      ++failed_;
      std::printf("    fail: %s\n", what.c_str());
    }
  }
  void note(const std::string& what) const { std::printf("    %s\n", what.c_str()); }
  bool ok() const { return failed_ == 0; }
  std::string tally() const {
    return std::to_string(total_ - failed_) + "/" + std::to_string(total_) + " checks";
  }

 private:
  int total_ = 0;
  int failed_ = 0;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

bool near(double value, double target, double tol) { return std::fabs(value - target) <= tol; }

// ---- 1: constants ---------------------------------------------------------

bool criterion_1(Checks& c) {
  const auto start = Clock::now();
  const LlcConstants& k = llc_constants();
  const double pr = sigma_minimizers(k.max_or).pr_d_given_e;
  const double elapsed = seconds_since(start);
  c.expect(near(k.psi_star, 1.19967864, 1e-8), fmt("psi_star %.12f", k.psi_star));
  c.expect(near(k.max_log_or, 4.79871, 1e-4), fmt("max_log_or %.12f", k.max_log_or));
  c.expect(near(k.llc, 0.66274, 1e-4), fmt("llc %.12f", k.llc));
  c.expect(near(pr, 0.9167782798, 1e-9), fmt("Pr(D|E) at the maximum %.12f", pr));
  c.expect(elapsed < 1.0, fmt("runtime %.3f s", elapsed));
  c.note(fmt("psi_star=%.10f max_log_or=%.10f llc=%.10f Pr(D|E)=%.10f (%.4f s)", k.psi_star,
             k.max_log_or, k.llc, pr, elapsed));
  return c.ok();
}

// ---- 2: formula equivalences ------------------------------------------------

bool criterion_2(Checks& c) {
  const auto start = Clock::now();
  double worst_gamma = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double psi = -12.0 + 24.0 * i / 9999.0;
    const double a = gamma_of_psi(psi), b = gamma_of_psi_unsimplified(psi);
    worst_gamma = std::max(worst_gamma, std::fabs(a - b));
  }
  c.expect(worst_gamma <= 1e-12, fmt("gamma forms differ by %.3g", worst_gamma));

  std::mt19937_64 gen(20240);
  std::uniform_real_distribution<double> cell(0.5, 1000.0);
  double worst_sigma = 0.0, worst_zt = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const auto t = ContingencyTable::from_counts(cell(gen), cell(gen), cell(gen), cell(gen));
    const SampleEstimates e = estimates(t);
    const double reciprocal = 1 / t.n11() + 1 / t.n12() + 1 / t.n21() + 1 / t.n22();
    worst_sigma = std::max(worst_sigma,
                           std::fabs(e.sigma_hat * e.sigma_hat / e.n_total - reciprocal) / reciprocal);
    const double psi = log_or(t);
    if (in_monotone_range(psi)) {
      const double t_stat = t_test(t).statistic, z_stat = z_test(t).statistic;
      worst_zt = std::max(worst_zt, std::fabs(t_stat - z_stat / zt_ratio(psi)) /
                                        std::max(1.0, std::fabs(t_stat)));
    }
  }
  c.expect(worst_sigma <= 1e-12, fmt("sigma^2/N vs sum 1/n_ij: %.3g", worst_sigma));
  c.expect(worst_zt <= 1e-10, fmt("T vs Z / zt_ratio: %.3g", worst_zt));

  double worst_yule = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double psi = -8.0 + 16.0 * i / 9999.0;
    const double r = std::exp(psi);
    worst_yule = std::max({worst_yule, std::fabs(4 * std::atanh(yule_y(r)) - psi),
                           std::fabs(2 * std::atanh(yule_q(r)) - psi)});
  }
  c.expect(worst_yule <= 1e-12, fmt("Yule arctanh identities: %.3g", worst_yule));

  for (double r : {1.0 / 50.0, 0.5, 1.0, 2.0, 10.0, 50.0, 121.0}) {
    const double sigma_min = sigma_population_exposure(sigma_minimizers(r));
    double best = INFINITY;
    for (int i = 1; i <= 200; ++i) {
      for (int j = 1; j <= 200; ++j) {
        const double v = i / 201.0, a = j / 201.0;
        const double b = a / (a + r * (1.0 - a));
        best = std::min(best, std::sqrt(1.0 / v / (a * (1 - a)) + 1.0 / (1 - v) / (b * (1 - b))));
      }
    }
    c.expect(sigma_min <= best + 1e-6, fmt("OR %g: minimizer %.9f vs grid %.9f", r, sigma_min, best));
  }
  const double elapsed = seconds_since(start);
  c.expect(elapsed < 10.0, fmt("runtime %.2f s", elapsed));
  c.note(fmt("property suite %.2f s", elapsed));
  return c.ok();
}

// ---- 3, 4: rejection studies -----------------------------------------------

constexpr std::uint64_t kSeed = 1;
constexpr std::int64_t kDeskReplicates = 100000;

bool criterion_3(Checks& c) {
  struct Target {
    std::int64_t n;
    double z, t;
  };
  const Target targets[] = {{25, 0.0290, 0.0508}, {100, 0.0432, 0.0494}, {1000, 0.0485, 0.0490}};
  SimulationConfig config;
  config.kind = StudyKind::TypeOne;
  config.replicates = kDeskReplicates;
  config.seed = kSeed;
  for (const Target& t : targets) config.n_cases.push_back(t.n);
  const auto start = Clock::now();
  const StudyReport report = run_type1(config);
  const double elapsed = seconds_since(start);
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const StudyRow& row = report.rows[i];
    const Target& t = targets[i];
    c.expect(near(row.rejection_rate_z, t.z, 0.004),
             fmt("n_D=%lld Z size %.4f vs %.4f", static_cast<long long>(t.n), row.rejection_rate_z, t.z));
    c.expect(near(row.rejection_rate_t, t.t, 0.004),
             fmt("n_D=%lld T size %.4f vs %.4f", static_cast<long long>(t.n), row.rejection_rate_t, t.t));
    c.note(fmt("n_D=%lld: Z %.4f (reference %.4f), T %.4f (reference %.4f), MC-SE %.4f", static_cast<long long>(t.n),
               row.rejection_rate_z, t.z, row.rejection_rate_t, t.t, row.mc_se_t));
  }
  c.expect(elapsed / 3.0 <= 120.0, fmt("runtime %.1f s per setting", elapsed / 3.0));
  return c.ok();
}

bool criterion_4(Checks& c) {
  struct Cell {
    EffectSpec effect;
    const char* name;
    std::int64_t n;
    double z, t, tol;
  };
  const Cell cells[] = {{FixedEffect{std::log(2.0)}, "OR=2", 100, 0.499, 0.521, 0.010},
                        {FixedEffect{std::log(3.0)}, "OR=3", 50, 0.559, 0.602, 0.010},
                        {NormalEffect{default_tau()}, "tau=0.42", 25, 0.065, 0.098, 0.006}};
  const auto start = Clock::now();
  for (const Cell& cell : cells) {
    SimulationConfig config;
    config.kind = StudyKind::Power;
    config.replicates = kDeskReplicates;
    config.seed = kSeed;
    config.n_cases = {cell.n};
    config.effects = {cell.effect};
    const StudyRow row = run_power(config).rows.at(0);
    const long long n = cell.n;
    c.expect(near(row.rejection_rate_z, cell.z, cell.tol),
             fmt("%s n_D=%lld Z power %.4f vs %.3f", cell.name, n, row.rejection_rate_z, cell.z));
    c.expect(near(row.rejection_rate_t, cell.t, cell.tol),
             fmt("%s n_D=%lld T power %.4f vs %.3f", cell.name, n, row.rejection_rate_t, cell.t));
    const double se = std::hypot(row.mc_se_z, row.mc_se_t);
    c.expect(row.rejection_rate_t >= row.rejection_rate_z - 2 * se,
             fmt("%s n_D=%lld T power below Z power", cell.name, n));
    c.note(fmt("%s n_D=%lld: Z %.4f (reference %.3f), T %.4f (reference %.3f)", cell.name, n,
               row.rejection_rate_z, cell.z, row.rejection_rate_t, cell.t));
  }
  const double elapsed = seconds_since(start);
  c.expect(elapsed / 3.0 <= 120.0, fmt("runtime %.1f s per setting", elapsed / 3.0));
  return c.ok();
}

// ---- 5: selection study ----------------------------------------------------

bool criterion_5(Checks& c) {
  SimulationConfig config;
  config.kind = StudyKind::Selection;
  config.n_cases = {500};
  config.n_tests = 10000;
  config.replicates = 500;
  config.seed = kSeed;
  const auto start = Clock::now();
  const StudyRow row = run_selection(config).rows.at(0);
  const double elapsed = seconds_since(start);
  const double truth = row.true_mean_gamma_prime;
  c.expect(near(row.posterior_mean_gamma_prime, truth, 0.03),
           fmt("posterior mean %.4f vs true %.4f", row.posterior_mean_gamma_prime, truth));
  c.expect(row.frequentist_mean_gamma_prime - truth >= 0.05,
           fmt("frequentist mean %.4f exceeds true %.4f by less than 0.05",
               row.frequentist_mean_gamma_prime, truth));
  c.expect(near(row.hpd_coverage, 0.94, 0.03), fmt("HPD coverage %.3f", row.hpd_coverage));
  c.expect(elapsed <= 900.0, fmt("runtime %.1f s", elapsed));
  c.note(fmt("true %.4f, posterior %.4f, frequentist %.4f, coverage %.3f (reference 0.46/0.46/0.55/94%%), %.1f s",
             truth, row.posterior_mean_gamma_prime, row.frequentist_mean_gamma_prime,
             row.hpd_coverage, elapsed));
  return c.ok();
}

// ---- 6: dietary table ------------------------------------------------------

struct Published {
  double gamma_prime;
  double mean[3], low[3], high[3];
};

bool criterion_6(Checks& c) {
  // Point value, then mean (low, high) at pi0 = 0.25, 0.5, 0.75.
  const Published table[] = {
      {-0.13, {-0.13, -0.13, -0.12}, {-0.20, -0.20, -0.21}, {-0.05, -0.05, -0.03}},
      {0.06, {0.053, 0.05, 0.04}, {0.01, -0.00, -0.00}, {0.10, 0.01, 0.08}},
      {0.19, {0.15, 0.13, 0.10}, {-0.00, -0.00, -0.05}, {0.29, 0.27, 0.26}},
      {-0.14, {-0.12, -0.10, -0.08}, {-0.23, -0.21, -0.20}, {0.00, 0.00, 0.04}},
      {-0.26, {-0.17, -0.15, -0.11}, {-0.34, -0.32, -0.30}, {0.01, 0.03, 0.09}},
      {-0.06, {-0.043, -0.03, -0.01}, {-0.10, -0.09, -0.08}, {0.01, 0.03, 0.05}}};
  const double pi0s[] = {0.25, 0.5, 0.75};

  std::vector<std::vector<std::string>> rows;
  for (const auto line : text::lines(dietary_csv())) {
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    std::vector<std::string> fields;
    for (const auto f : text::split_fields(trimmed)) fields.emplace_back(f);
    rows.push_back(fields);
  }
  if (rows.size() != 7) {
    c.expect(false, "bundled dataset does not have six rows");
    return false;
  }
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& f = rows[i + 1];
    const double odds = std::stod(f[1]);
    const double se = summary_to_se(odds, std::stod(f[2]), std::stod(f[3]), std::stod(f[4]));
    const double psi = std::log(odds);
    const double gp = gamma_prime_of_psi(psi);
    const Published& ref = table[i];
    c.expect(near(gp, ref.gamma_prime, 0.005),
             fmt("%s gamma-prime %.4f vs %.2f", f[0].c_str(), gp, ref.gamma_prime));
    std::string line = fmt("%-18s g'=%7.4f", f[0].c_str(), gp);
    for (int k = 0; k < 3; ++k) {
      const BinnedPrior prior = make_default_prior(pi0s[k], 0.42, 4.8, 100);
      const PosteriorResult r =
          infer_posterior(prior, psi / se, se, Sided::One, Scale::GammaPrime, 0.95);
      const std::string where = fmt("%s pi0=%.2f", f[0].c_str(), pi0s[k]);
      c.expect(near(r.mean, ref.mean[k], 0.02),
               fmt("%s mean %.4f vs %.3f", where.c_str(), r.mean, ref.mean[k]));
      c.expect(near(r.hpd_low, ref.low[k], 0.02),
               fmt("%s HPD low %.4f vs %.2f", where.c_str(), r.hpd_low, ref.low[k]));
      c.expect(near(r.hpd_high, ref.high[k], 0.02),
               fmt("%s HPD high %.4f vs %.2f", where.c_str(), r.hpd_high, ref.high[k]));
      line += fmt("  %7.4f (%7.4f, %7.4f)", r.mean, r.hpd_low, r.hpd_high);
    }
    c.note(line);
  }
  return c.ok();
}

// ---- 7: posterior micro-oracle --------------------------------------------

bool criterion_7(Checks& c) {
  // Brute force: prior {0: 1/2, 0.5: 1/2}, se 0.25, observed statistic 2.
  const BinnedPrior prior =
      BinnedPrior::from_bins({PriorBin{0.0, 0.5, 0.0, 0.0}, PriorBin{0.5, 0.5, 0.25, 0.75}});
  const std::vector<double> w = posterior_weights(prior, dress(prior, 0.25), 2.0, Sided::One);
  const boost::math::normal_distribution<long double> n01;
  const long double l0 = boost::math::pdf(n01, 2.0L - 0.0L) * 0.5L;
  const long double l1 = boost::math::pdf(n01, 2.0L - 0.5L / 0.25L) * 0.5L;
  const double b0 = static_cast<double>(l0 / (l0 + l1)), b1 = static_cast<double>(l1 / (l0 + l1));
  c.expect(near(w[0], b0, 1e-10) && near(w[1], b1, 1e-10),
           fmt("weights %.12f/%.12f vs brute force %.12f/%.12f", w[1], w[0], b1, b0));
  c.expect(near(w[1], 0.8808, 5e-5) && near(w[0], 0.1192, 5e-5),
           fmt("weights %.4f/%.4f vs 0.8808/0.1192", w[1], w[0]));

  double worst = 0.0;
  boost::math::quadrature::tanh_sinh<double> integrator;
  const boost::math::normal_distribution<double> std_normal;
  for (double xi = 0.0; xi <= 5.0; xi += 0.5) {
    const boost::math::non_central_chi_squared_distribution<double> nc(1.0, xi * xi);
    for (double t = 0.1; t <= 6.0; t += 0.3) {
      // Density of |T| by differentiating the integrated chi-square mass.
      const double h = 1e-4;
      const auto mass = [&](double u) {
        return integrator.integrate([&](double x) { return boost::math::pdf(nc, x); }, 0.0, u * u);
      };
      const double numeric = (mass(t + h) - mass(t - h)) / (2 * h);
      worst = std::max(worst, std::fabs(statistic_density(t, xi, Sided::Two) - numeric));
      const double cdf = boost::math::cdf(std_normal, t - xi) + boost::math::cdf(std_normal, t + xi) - 1.0;
      worst = std::max(worst, std::fabs(mass(t) - cdf));
    }
  }
  c.expect(worst <= 1e-6, fmt("folded normal vs noncentral chi-square(1): %.3g", worst));
  c.note(fmt("weights %.10f/%.10f; folded-normal max deviation %.3g", w[1], w[0], worst));
  return c.ok();
}

// ---- 8: determinism through the CLI ---------------------------------------

std::string capture(const std::string& args, int& status) {
  const std::string command = std::string(GP_CLI_PATH) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (pipe == nullptr) {
    status = -1;
    return out;
  }
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int raw = ::pclose(pipe);
  status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

bool criterion_8(Checks& c) {
  const char* runs[] = {
      "simulate type1 --n-cases 25,100 --reps 20000 --seed 17",
      "simulate power --n-cases 50 --or 2,3 --tau 0.42 --reps 20000 --seed 17",
      "simulate selection --n-cases 200 --tests 500 --reps 40 --seed 17 --scale gammaprime"};
  const unsigned many = std::max(4u, std::thread::hardware_concurrency());
  for (const char* args : runs) {
    int s1 = 0, s2 = 0, s3 = 0;
    const std::string base = std::string(args) + " --format csv --threads ";
    const std::string one = capture(base + "1", s1);
    const std::string again = capture(base + "1", s2);
    const std::string parallel = capture(base + std::to_string(many), s3);
    c.expect(s1 == 0 && s2 == 0 && s3 == 0, fmt("%s: nonzero exit", args));
    c.expect(!one.empty() && one == again, fmt("%s: repeated run differs", args));
    c.expect(one == parallel, fmt("%s: 1 vs %u threads differ", args, many));
  }
  c.note(fmt("compared 1 and %u threads", many));
  return c.ok();
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc == 3 && std::string(argv[1]) == "--only") only = std::atoi(argv[2]);
  if ((argc != 1 && argc != 3) || only < 0 || only > 8) {
    std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
    return 2;
  }
  const std::function<bool(Checks&)> criteria[] = {criterion_1, criterion_2, criterion_3,
                                                   criterion_4, criterion_5, criterion_6,
                                                   criterion_7, criterion_8};
  bool all = true;
  for (int i = 1; i <= 8; ++i) {
    if (only != 0 && only != i) continue;
    Checks checks;
    bool ok = false;
    try {
      ok = criteria[i - 1](checks);
    } catch (const std::exception& e) {
      checks.expect(false, std::string("exception: ") + e.what());
    }
    ok = ok && checks.ok();
    std::printf("criterion %d: %s (%s)\n", i, ok ? "PASS" : "FAIL", checks.tally().c_str());
    std::fflush(stdout);
    all = all && ok;
  }
  return all ? 0 : 1;
}

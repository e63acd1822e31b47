#include "gammaprime/mcstudy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "gammaprime/effects.hpp"
#include "gammaprime/error.hpp"
#include "gammaprime/hypotest.hpp"
#include "text.hpp"

#include <json.hpp>

namespace gammaprime {

namespace {

// Streams are keyed by (setting, replicate) so every replicate draws the
// same numbers whichever thread runs it.
std::uint64_t stream_key(std::size_t setting, std::int64_t replicate) {
  return (static_cast<std::uint64_t>(setting) << 40) ^ static_cast<std::uint64_t>(replicate);
}

template <typename Body>
void parallel_for(std::int64_t count, unsigned threads, Body body) {
  const auto workers = static_cast<std::int64_t>(
      std::max<unsigned>(1, std::min<std::int64_t>(threads, std::max<std::int64_t>(count, 1))));
  if (workers == 1) {
    body(0, std::int64_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  pool.reserve(static_cast<std::size_t>(workers));
  for (std::int64_t w = 0; w < workers; ++w) {
    const std::int64_t begin = count * w / workers;
    const std::int64_t end = count * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        body(static_cast<std::size_t>(w), begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double rate_se(double rate, std::int64_t n) {
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(n));
}

struct MeanAndSe {
  double mean;
  double se;
};

// Sequential in replicate order: the same bits for any thread count.
MeanAndSe mean_and_se(const std::vector<double>& xs) {
  const auto n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = xs.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n)};
}

class EffectSampler {
 public:
  explicit EffectSampler(const EffectSpec& spec) : spec_(spec) {
    if (const auto* m = std::get_if<MixtureEffect>(&spec_)) {
      prior_ = make_default_prior(m->pi0, m->tau, m->truncation, m->bins);
      double acc = 0.0;
      for (const auto& b : prior_->bins()) {
        acc += b.probability;
        cumulative_.push_back(acc);
      }
    }
  }

  double draw(RandomStream& stream) const {
    if (const auto* f = std::get_if<FixedEffect>(&spec_)) return f->log_or;
    if (const auto* n = std::get_if<NormalEffect>(&spec_)) return stream.normal(0.0, n->tau);
    const double u = stream.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return prior_->bins()[static_cast<std::size_t>(it - cumulative_.begin())].midpoint;
  }

  const BinnedPrior& prior() const { return *prior_; }

 private:
  EffectSpec spec_;
  std::optional<BinnedPrior> prior_;
  std::vector<double> cumulative_;
};

std::vector<EffectSpec> effects_or_default(const SimulationConfig& config) {
  if (!config.effects.empty()) return config.effects;
  switch (config.kind) {
    case StudyKind::TypeOne: return {FixedEffect{0.0}};
    case StudyKind::Power: return {FixedEffect{std::log(2.0)}};
    case StudyKind::Selection: return {MixtureEffect{0.8, default_tau(), 4.8, 100}};
  }
  return {};
}

StudyReport run_rejection_study(const SimulationConfig& config) {
  validate(config);
  const unsigned threads = resolve_threads(config.threads);
  StudyReport report;
  report.kind = config.kind;
  const auto effects = effects_or_default(config);
  std::size_t setting = 0;
  for (const EffectSpec& effect : effects) {
    const EffectSampler sampler(effect);
    for (const std::int64_t n_cases : config.n_cases) {
      struct Counts {
        std::int64_t z = 0, t = 0, excluded = 0;
      };
      std::vector<Counts> per_worker(std::max(1u, threads));
      parallel_for(config.replicates, threads,
                   [&](std::size_t worker, std::int64_t begin, std::int64_t end) {
                     Counts c;
                     for (std::int64_t rep = begin; rep < end; ++rep) {
                       RandomStream stream(config.seed, stream_key(setting, rep));
                       const double psi = sampler.draw(stream);
                       const ContingencyTable table = sample_table(psi, n_cases, stream);
                       if (z_test(table).p_two_sided <= config.alpha) ++c.z;
                       if (in_monotone_range(log_or(table))) {
                         if (t_test(table).p_two_sided <= config.alpha) ++c.t;
                       } else {
                         ++c.excluded;
                       }
                     }
                     per_worker[worker] = c;
                   });
      Counts total;
      for (const Counts& c : per_worker) {
        total.z += c.z;
        total.t += c.t;
        total.excluded += c.excluded;
      }
      StudyRow row;
      row.effect = describe(effect);
      row.n_cases = n_cases;
      row.replicates = config.replicates;
      const auto reps = static_cast<double>(config.replicates);
      row.rejection_rate_z = static_cast<double>(total.z) / reps;
      row.rejection_rate_t = static_cast<double>(total.t) / reps;
      row.mc_se_z = rate_se(row.rejection_rate_z, config.replicates);
      row.mc_se_t = rate_se(row.rejection_rate_t, config.replicates);
      row.t_excluded = total.excluded;
      report.rows.push_back(row);
      ++setting;
    }
  }
  return report;
}

}  // namespace

std::string describe(const EffectSpec& effect) {
  using text::format_number;
  if (const auto* f = std::get_if<FixedEffect>(&effect)) {
    return "log_or=" + format_number(f->log_or);
  }
  if (const auto* n = std::get_if<NormalEffect>(&effect)) return "tau=" + format_number(n->tau);
  const auto& m = std::get<MixtureEffect>(effect);
  return "pi0=" + format_number(m.pi0) + ";tau=" + format_number(m.tau) +
         ";trunc=" + format_number(m.truncation) + ";bins=" + std::to_string(m.bins);
}

double default_tau() { return std::log(2.0) / normal_quantile(0.95); }

const char* to_string(StudyKind kind) noexcept {
  switch (kind) {
    case StudyKind::TypeOne: return "type1";
    case StudyKind::Power: return "power";
    case StudyKind::Selection: return "selection";
  }
  return "unknown";
}

void validate(const SimulationConfig& config) {
  const auto fail = [](const std::string& what) { raise(ErrorCode::InvalidArgument, what); };
  if (config.replicates < 1) fail("replicates must be at least 1");
  if (config.n_cases.empty()) fail("at least one number of cases is required");
  for (const auto n : config.n_cases) {
    if (n < 1) fail("number of cases must be at least 1");
  }
  if (!(config.alpha > 0.0 && config.alpha <= 1.0)) fail("alpha must lie in (0, 1]");
  if (!(config.credibility > 0.0 && config.credibility < 1.0)) {
    fail("credibility must lie in (0, 1)");
  }
  for (const EffectSpec& e : config.effects) {
    if (const auto* f = std::get_if<FixedEffect>(&e)) {
      if (!std::isfinite(f->log_or)) fail("fixed log(OR) must be finite");
      if (config.kind == StudyKind::TypeOne && f->log_or != 0.0) {
        fail("the type-I study runs under log(OR) = 0 only");
      }
      if (config.kind == StudyKind::Selection) fail("the selection study needs a mixture effect");
    } else if (const auto* n = std::get_if<NormalEffect>(&e)) {
      if (!(n->tau > 0.0) || !std::isfinite(n->tau)) fail("tau must be positive");
      if (config.kind != StudyKind::Power) fail("normal effects apply to the power study only");
    } else {
      const auto& m = std::get<MixtureEffect>(e);
      if (config.kind != StudyKind::Selection) {
        fail("mixture effects apply to the selection study only");
      }
      if (!(m.pi0 >= 0.0 && m.pi0 <= 1.0)) fail("pi0 must lie in [0, 1]");
      if (!(m.tau > 0.0) || !(m.truncation > 0.0)) fail("tau and truncation must be positive");
      if (m.bins < 2) fail("the mixture needs at least two bins");
      if (m.pi0 > 0.0 && m.pi0 < 1.0 && m.bins % 2 != 0) fail("the mixture needs an even bin count");
    }
  }
  if (config.kind == StudyKind::Selection) {
    if (config.effects.size() > 1) fail("the selection study takes exactly one mixture effect");
    if (config.n_tests < 1) fail("number of tests must be at least 1");
  }
}

unsigned resolve_threads(unsigned requested) {
  unsigned threads = requested != 0 ? requested : std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  if (const char* cap = std::getenv("GAMMAPRIME_THREADS")) {
    const long limit = std::strtol(cap, nullptr, 10);
    if (limit > 0) threads = std::min<unsigned>(threads, static_cast<unsigned>(limit));
  }
  return threads;
}

ContingencyTable sample_table(double log_or_value, std::int64_t n_cases, RandomStream& stream) {
  if (n_cases < 1) raise(ErrorCode::Domain, "sample_table: need at least one case");
  const double nd = static_cast<double>(n_cases);
  const auto n_controls =
      std::max<std::int64_t>(1, std::llrint(stream.uniform(0.5 * nd, nd)));
  const double p = stream.uniform(0.05, 0.95);
  const double q = q_from_p_or(p, std::exp(log_or_value));
  const std::int64_t exposed_cases = stream.binomial(n_cases, p);
  const std::int64_t exposed_controls = stream.binomial(n_controls, q);
  const auto raw = ContingencyTable::from_counts(
      static_cast<double>(exposed_cases), static_cast<double>(n_cases - exposed_cases),
      static_cast<double>(exposed_controls), static_cast<double>(n_controls - exposed_controls));
  return haldane_correct(raw);
}

StudyReport run_type1(const SimulationConfig& config) {
  SimulationConfig c = config;
  c.kind = StudyKind::TypeOne;
  return run_rejection_study(c);
}

StudyReport run_power(const SimulationConfig& config) {
  SimulationConfig c = config;
  c.kind = StudyKind::Power;
  return run_rejection_study(c);
}

StudyReport run_selection(const SimulationConfig& config) {
  SimulationConfig c = config;
  c.kind = StudyKind::Selection;
  validate(c);
  const unsigned threads = resolve_threads(c.threads);
  const EffectSpec effect = effects_or_default(c).front();
  const EffectSampler sampler(effect);
  const BinnedPrior& prior = sampler.prior();

  StudyReport report;
  report.kind = StudyKind::Selection;
  std::size_t setting = 0;
  for (const std::int64_t n_cases : c.n_cases) {
    const auto reps = static_cast<std::size_t>(c.replicates);
    std::vector<double> truth(reps), post(reps), freq(reps), covered(reps);
    parallel_for(c.replicates, threads, [&](std::size_t, std::int64_t begin, std::int64_t end) {
      for (std::int64_t rep = begin; rep < end; ++rep) {
        RandomStream stream(c.seed, stream_key(setting, rep));
        double best_abs_z = -1.0, best_z = 0.0, best_psi = 0.0, best_hat = 0.0, best_se = 1.0;
        for (std::int64_t test = 0; test < c.n_tests; ++test) {
          const double psi = sampler.draw(stream);
          const ContingencyTable table = sample_table(psi, n_cases, stream);
          const double psi_hat = log_or(table);
          const double se = woolf_se(table);
          const double z = psi_hat / se;
          if (std::fabs(z) > best_abs_z) {
            best_abs_z = std::fabs(z);
            best_z = z;
            best_psi = psi;
            best_hat = psi_hat;
            best_se = se;
          }
        }
        const double sign = best_z < 0.0 ? -1.0 : 1.0;
        const std::vector<double> xi = dress(prior, best_se);
        const std::vector<double> w = posterior_weights(prior, xi, best_z, Sided::One);
        const PosteriorResult on_gp = undress(prior, w, best_se, Scale::GammaPrime);
        PosteriorResult on_scale =
            c.scale == Scale::GammaPrime ? on_gp : undress(prior, w, best_se, Scale::LogOr);
        const auto [lo, hi] = hpd_interval(on_scale, c.credibility);
        const double target = c.scale == Scale::GammaPrime ? gamma_prime_of_psi(best_psi) : best_psi;

        const auto i = static_cast<std::size_t>(rep);
        truth[i] = sign * gamma_prime_of_psi(best_psi);
        post[i] = sign * on_gp.mean;
        freq[i] = sign * gamma_prime_of_psi(best_hat);
        covered[i] = (lo <= target && target <= hi) ? 1.0 : 0.0;
      }
    });
    StudyRow row;
    row.effect = describe(effect);
    row.n_cases = n_cases;
    row.n_tests = c.n_tests;
    row.replicates = c.replicates;
    const MeanAndSe t = mean_and_se(truth), p = mean_and_se(post), f = mean_and_se(freq),
                    cov = mean_and_se(covered);
    row.true_mean_gamma_prime = t.mean;
    row.posterior_mean_gamma_prime = p.mean;
    row.frequentist_mean_gamma_prime = f.mean;
    row.hpd_coverage = cov.mean;
    row.mc_se_true = t.se;
    row.mc_se_posterior = p.se;
    row.mc_se_frequentist = f.se;
    row.mc_se_coverage = rate_se(cov.mean, c.replicates);
    report.rows.push_back(row);
    ++setting;
  }
  return report;
}

StudyReport run_study(const SimulationConfig& config) {
  switch (config.kind) {
    case StudyKind::TypeOne: return run_type1(config);
    case StudyKind::Power: return run_power(config);
    case StudyKind::Selection: return run_selection(config);
  }
  raise(ErrorCode::InvalidArgument, "unknown study kind");
}

namespace {

bool is_selection(const StudyReport& report) { return report.kind == StudyKind::Selection; }

}  // namespace

std::string render_csv(const StudyReport& report) {
  using text::format_number;
  std::ostringstream out;
  const char* kind = to_string(report.kind);
  if (is_selection(report)) {
    out << "study,effect,n_cases,n_tests,replicates,true_mean_gamma_prime,"
           "posterior_mean_gamma_prime,frequentist_mean_gamma_prime,hpd_coverage,"
           "mc_se_true,mc_se_posterior,mc_se_frequentist,mc_se_coverage\n";
    for (const StudyRow& r : report.rows) {
      out << kind << ',' << r.effect << ',' << r.n_cases << ',' << r.n_tests << ','
          << r.replicates << ',' << format_number(r.true_mean_gamma_prime) << ','
          << format_number(r.posterior_mean_gamma_prime) << ','
          << format_number(r.frequentist_mean_gamma_prime) << ','
          << format_number(r.hpd_coverage) << ',' << format_number(r.mc_se_true) << ','
          << format_number(r.mc_se_posterior) << ',' << format_number(r.mc_se_frequentist)
          << ',' << format_number(r.mc_se_coverage) << '\n';
    }
  } else {
    out << "study,effect,n_cases,replicates,rejection_rate_z,rejection_rate_t,mc_se_z,mc_se_t,"
           "t_excluded\n";
    for (const StudyRow& r : report.rows) {
      out << kind << ',' << r.effect << ',' << r.n_cases << ',' << r.replicates << ','
          << format_number(r.rejection_rate_z) << ',' << format_number(r.rejection_rate_t)
          << ',' << format_number(r.mc_se_z) << ',' << format_number(r.mc_se_t) << ','
          << r.t_excluded << '\n';
    }
  }
  return out.str();
}

std::string render_text(const StudyReport& report) {
  std::ostringstream out;
  char buf[256];
  if (is_selection(report)) {
    out << "Selection study (largest |Z| of L tests)\n";
    std::snprintf(buf, sizeof buf, "%-32s %8s %8s %8s %10s %10s %10s %9s\n", "effect", "n_D", "L",
                  "reps", "true", "posterior", "freq", "coverage");
    out << buf;
    for (const StudyRow& r : report.rows) {
      std::snprintf(buf, sizeof buf, "%-32s %8lld %8lld %8lld %10.4f %10.4f %10.4f %9.4f\n",
                    r.effect.c_str(), static_cast<long long>(r.n_cases),
                    static_cast<long long>(r.n_tests), static_cast<long long>(r.replicates),
                    r.true_mean_gamma_prime, r.posterior_mean_gamma_prime,
                    r.frequentist_mean_gamma_prime, r.hpd_coverage);
      out << buf;
    }
  } else {
    out << (report.kind == StudyKind::TypeOne ? "Type-I error study\n" : "Power study\n");
    std::snprintf(buf, sizeof buf, "%-24s %8s %8s %10s %10s %10s\n", "effect", "n_D", "reps",
                  "Z", "T", "T-undef");
    out << buf;
    for (const StudyRow& r : report.rows) {
      std::snprintf(buf, sizeof buf, "%-24s %8lld %8lld %10.4f %10.4f %10lld\n", r.effect.c_str(),
                    static_cast<long long>(r.n_cases), static_cast<long long>(r.replicates),
                    r.rejection_rate_z, r.rejection_rate_t, static_cast<long long>(r.t_excluded));
      out << buf;
    }
  }
  return out.str();
}

std::string render_json(const StudyReport& report) {
  const auto num = [](double x) -> nlohmann::json {
    if (std::isnan(x)) return nullptr;
    return std::stod(text::format_number(x));
  };
  nlohmann::json rows = nlohmann::json::array();
  for (const StudyRow& r : report.rows) {
    nlohmann::json row{{"effect", r.effect}, {"n_cases", r.n_cases}, {"replicates", r.replicates}};
    if (is_selection(report)) {
      row["n_tests"] = r.n_tests;
      row["true_mean_gamma_prime"] = num(r.true_mean_gamma_prime);
      row["posterior_mean_gamma_prime"] = num(r.posterior_mean_gamma_prime);
      row["frequentist_mean_gamma_prime"] = num(r.frequentist_mean_gamma_prime);
      row["hpd_coverage"] = num(r.hpd_coverage);
      row["mc_se_true"] = num(r.mc_se_true);
      row["mc_se_posterior"] = num(r.mc_se_posterior);
      row["mc_se_frequentist"] = num(r.mc_se_frequentist);
      row["mc_se_coverage"] = num(r.mc_se_coverage);
    } else {
      row["rejection_rate_z"] = num(r.rejection_rate_z);
      row["rejection_rate_t"] = num(r.rejection_rate_t);
      row["mc_se_z"] = num(r.mc_se_z);
      row["mc_se_t"] = num(r.mc_se_t);
      row["t_excluded"] = r.t_excluded;
    }
    rows.push_back(std::move(row));
  }
  return nlohmann::json{{"study", to_string(report.kind)}, {"rows", rows}}.dump(2) + "\n";
}

}  // namespace gammaprime

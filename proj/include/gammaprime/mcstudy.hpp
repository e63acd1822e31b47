#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "gammaprime/contab.hpp"
#include "gammaprime/numerics.hpp"
#include "gammaprime/posterior.hpp"

namespace gammaprime {

/// True log(OR) fixed across replicates.
struct FixedEffect {
  double log_or = 0.0;
};

/// True log(OR) drawn per replicate from Normal(0, tau).
struct NormalEffect {
  double tau = 0.0;
};

/// True log(OR) drawn from the discretized mixture prior: zero with
/// probability pi0, otherwise a bin midpoint of the truncated Normal(0, tau).
struct MixtureEffect {
  double pi0 = 0.8;
  double tau = 0.0;
  double truncation = 4.8;
  int bins = 100;
};

using EffectSpec = std::variant<FixedEffect, NormalEffect, MixtureEffect>;

std::string describe(const EffectSpec& effect);

/// log(2) / Phi^-1(0.95): a 5% prior chance of OR >= 2.
double default_tau();

enum class StudyKind { TypeOne, Power, Selection };

const char* to_string(StudyKind kind) noexcept;

struct SimulationConfig {
  StudyKind kind = StudyKind::TypeOne;
  /// One report row per (effect, n_cases) pair.
  std::vector<std::int64_t> n_cases;
  std::int64_t replicates = 100000;
  std::uint64_t seed = 1;
  /// TypeOne: empty or {FixedEffect{0}}. Power: fixed or normal effects.
  /// Selection: exactly one MixtureEffect (empty means the default mixture).
  std::vector<EffectSpec> effects;
  /// Two-sided test size.
  double alpha = 0.05;
  /// Number of tests L the maximum is selected from (selection study).
  std::int64_t n_tests = 10000;
  /// Scale of the HPD interval whose coverage the selection study reports.
  Scale scale = Scale::LogOr;
  double credibility = 0.95;
  /// 0 picks the hardware concurrency; GAMMAPRIME_THREADS caps either way.
  unsigned threads = 0;
};

/// Throws InvalidArgument describing the first problem found.
void validate(const SimulationConfig& config);

struct StudyRow {
  std::string effect;
  std::int64_t n_cases = 0;
  std::int64_t n_tests = 1;
  std::int64_t replicates = 0;

  double rejection_rate_z = 0.0;
  double rejection_rate_t = 0.0;
  double mc_se_z = 0.0;
  double mc_se_t = 0.0;
  /// Replicates where |log(OR-hat)| >= max_log_or, so T is undefined; they
  /// count as non-rejections.
  std::int64_t t_excluded = 0;

  double true_mean_gamma_prime = 0.0;
  double posterior_mean_gamma_prime = 0.0;
  double frequentist_mean_gamma_prime = 0.0;
  double hpd_coverage = 0.0;
  double mc_se_true = 0.0;
  double mc_se_posterior = 0.0;
  double mc_se_frequentist = 0.0;
  double mc_se_coverage = 0.0;
};

struct StudyReport {
  StudyKind kind = StudyKind::TypeOne;
  std::vector<StudyRow> rows;
};

/// One simulated, Haldane-corrected table. Draw order: number of controls
/// (nearest integer, ties to even, of Unif(n_D/2, n_D)), p ~ Unif(0.05, 0.95),
/// then the exposed counts among cases and among controls.
ContingencyTable sample_table(double log_or, std::int64_t n_cases, RandomStream& stream);

StudyReport run_type1(const SimulationConfig& config);
StudyReport run_power(const SimulationConfig& config);
/// Per replicate: draw L effects from the mixture, simulate L tables, keep
/// the one with the largest |Z|, and score it against the known prior.
/// Averages are sign-aligned with the selected Z so that both tails count.
StudyReport run_selection(const SimulationConfig& config);
/// Dispatches on config.kind.
StudyReport run_study(const SimulationConfig& config);

/// Thread count actually used for a request (see SimulationConfig::threads).
unsigned resolve_threads(unsigned requested);

std::string render_csv(const StudyReport& report);
std::string render_text(const StudyReport& report);
std::string render_json(const StudyReport& report);

}  // namespace gammaprime

#include "gammaprime/gammaprime.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <limits>
#include <mutex>
#include <new>
#include <optional>
#include <string>

#include "bundled_data.hpp"
#include "gammaprime/contab.hpp"
#include "gammaprime/effects.hpp"
#include "gammaprime/hypotest.hpp"
#include "gammaprime/mcstudy.hpp"
#include "gammaprime/posterior.hpp"

struct gp_table {
  gammaprime::ContingencyTable table;
};

struct gp_prior {
  gammaprime::BinnedPrior prior;
};

struct gp_posterior {
  gammaprime::PosteriorResult result;
};

struct gp_sim_config {
  gammaprime::SimulationConfig config;
};

struct gp_report {
  gammaprime::StudyReport report;
};

namespace {

using namespace gammaprime;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

thread_local std::string last_error;

std::mutex warning_mutex;
gp_warning_fn warning_fn = nullptr;
void* warning_user = nullptr;

void forward_warning(std::string_view message) {
  gp_warning_fn fn;
  void* user;
  {
    std::lock_guard lock(warning_mutex);
    fn = warning_fn;
    user = warning_user;
  }
  if (fn) {
    const std::string copy(message);
    fn(copy.c_str(), user);
  }
}

const WarningHandler& warning_handler() {
  static const WarningHandler handler = forward_warning;
  return handler;
}

gp_status status_of(ErrorCode code) { return static_cast<gp_status>(static_cast<int>(code)); }

gp_status fail(gp_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs body, translating exceptions into status codes.
template <typename Body>
gp_status guarded(Body&& body) noexcept {
  try {
    body();
    last_error.clear();
    return GP_OK;
  } catch (const Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(GP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(GP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(GP_ERR_INTERNAL, "unknown error");
  }
}

#define GP_REQUIRE(ptr) \
  if ((ptr) == nullptr) return fail(GP_ERR_NULL_POINTER, #ptr " is null")

Scale to_scale(gp_scale s) {
  if (s == GP_SCALE_LOG_OR) return Scale::LogOr;
  if (s == GP_SCALE_GAMMA_PRIME) return Scale::GammaPrime;
  raise(ErrorCode::InvalidArgument, "unknown scale");
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* gp_status_string(gp_status status) {
  switch (status) {
    case GP_OK: return "ok";
    case GP_ERR_NULL_POINTER: return "null pointer";
    case GP_ERR_INTERNAL: return "internal error";
    default: break;
  }
  const int code = static_cast<int>(status);
  if (code >= static_cast<int>(ErrorCode::Domain) && code <= static_cast<int>(ErrorCode::Io)) {
    return to_string(static_cast<ErrorCode>(code));
  }
  return "unknown status";
}

const char* gp_last_error(void) { return last_error.c_str(); }

const char* gp_version(void) { return "1.0.0"; }

void gp_set_warning_handler(gp_warning_fn handler, void* user_data) {
  std::lock_guard lock(warning_mutex);
  warning_fn = handler;
  warning_user = user_data;
}

gp_status gp_get_constants(gp_constants* out) {
  GP_REQUIRE(out);
  return guarded([&] {
    const LlcConstants& c = llc_constants();
    *out = {c.psi_star, c.max_log_or, c.llc, c.max_or};
  });
}

gp_status gp_gamma(double log_or, double* out) {
  GP_REQUIRE(out);
  if (!std::isfinite(log_or)) return fail(GP_ERR_DOMAIN, "log(OR) must be finite");
  return guarded([&] { *out = gamma_of_psi(log_or); });
}

gp_status gp_gamma_prime(double log_or, double* out) {
  GP_REQUIRE(out);
  if (!std::isfinite(log_or)) return fail(GP_ERR_DOMAIN, "log(OR) must be finite");
  return guarded([&] { *out = gamma_prime_of_psi(log_or, warning_handler()); });
}

gp_status gp_se_gamma_prime(double log_or, double se_log_or, double* out) {
  GP_REQUIRE(out);
  return guarded([&] { *out = se_gamma_prime_from_se(log_or, se_log_or); });
}

gp_status gp_yule(double odds_ratio, double* yule_y_out, double* yule_q_out) {
  GP_REQUIRE(yule_y_out);
  GP_REQUIRE(yule_q_out);
  return guarded([&] {
    *yule_y_out = yule_y(odds_ratio);
    *yule_q_out = yule_q(odds_ratio);
  });
}

gp_status gp_zt_ratio(double log_or, double* out) {
  GP_REQUIRE(out);
  return guarded([&] { *out = zt_ratio(log_or); });
}

gp_status gp_normal_quantile(double p, double* out) {
  GP_REQUIRE(out);
  return guarded([&] { *out = normal_quantile(p); });
}

gp_status gp_table_create(double n11, double n12, double n21, double n22, gp_table** out) {
  GP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new gp_table{ContingencyTable::from_counts(n11, n12, n21, n22)}; });
}

gp_status gp_table_haldane(const gp_table* table, gp_table** out) {
  GP_REQUIRE(table);
  GP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new gp_table{haldane_correct(table->table)}; });
}

gp_status gp_table_cells(const gp_table* table, double cells[4], int* corrected) {
  GP_REQUIRE(table);
  GP_REQUIRE(cells);
  const ContingencyTable& t = table->table;
  cells[0] = t.n11();
  cells[1] = t.n12();
  cells[2] = t.n21();
  cells[3] = t.n22();
  if (corrected) *corrected = t.corrected() ? 1 : 0;
  last_error.clear();
  return GP_OK;
}

void gp_table_destroy(gp_table* table) { delete table; }

gp_status gp_table_analyze(const gp_table* table, gp_analysis* out) {
  GP_REQUIRE(table);
  GP_REQUIRE(out);
  return guarded([&] {
    const EffectSummary s = summarize(table->table, warning_handler());
    const TestResult z = z_test(table->table);
    gp_analysis a{};
    a.log_or = s.log_or;
    a.se_log_or = s.se_log_or;
    a.gamma = s.gamma;
    a.gamma_prime = s.gamma_prime;
    a.se_gamma_prime = s.se_gamma_prime.value_or(kNaN);
    a.yule_y = s.yule_y;
    a.yule_q = s.yule_q;
    a.z = z.statistic;
    a.p_z = z.p_two_sided;
    a.t = kNaN;
    a.p_t = kNaN;
    if (in_monotone_range(s.log_or)) {
      const TestResult t = t_test(table->table);
      a.t = t.statistic;
      a.p_t = t.p_two_sided;
    }
    a.n_total = s.n_total.value_or(kNaN);
    *out = a;
  });
}

gp_status gp_prior_default(double pi0, double tau, double truncation, int bins,
                           gp_prior** out) {
  GP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new gp_prior{make_default_prior(pi0, tau, truncation, bins)}; });
}

gp_status gp_prior_from_csv(const char* text, gp_prior** out) {
  GP_REQUIRE(text);
  GP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new gp_prior{parse_prior_csv(text)}; });
}

gp_status gp_prior_load(const char* path, gp_prior** out) {
  GP_REQUIRE(path);
  GP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new gp_prior{load_prior_file(path)}; });
}

gp_status gp_prior_size(const gp_prior* prior, size_t* out) {
  GP_REQUIRE(prior);
  GP_REQUIRE(out);
  *out = prior->prior.size();
  last_error.clear();
  return GP_OK;
}

void gp_prior_destroy(gp_prior* prior) { delete prior; }

gp_status gp_posterior_compute(const gp_prior* prior, double observed, double se,
                               gp_sided sided, gp_scale scale, double credibility,
                               gp_posterior** out) {
  GP_REQUIRE(prior);
  GP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    if (sided != GP_ONE_SIDED && sided != GP_TWO_SIDED) {
      raise(ErrorCode::InvalidArgument, "unknown sidedness");
    }
    if (!std::isfinite(observed)) raise(ErrorCode::Domain, "observed statistic must be finite");
    const Sided s = sided == GP_ONE_SIDED ? Sided::One : Sided::Two;
    *out = new gp_posterior{
        infer_posterior(prior->prior, observed, se, s, to_scale(scale), credibility)};
  });
}

gp_status gp_posterior_summary_get(const gp_posterior* posterior, gp_posterior_summary* out) {
  GP_REQUIRE(posterior);
  GP_REQUIRE(out);
  const PosteriorResult& r = posterior->result;
  *out = {r.mean, r.hpd_low, r.hpd_high, r.credibility, r.observed_statistic, r.se_used};
  last_error.clear();
  return GP_OK;
}

gp_status gp_posterior_size(const gp_posterior* posterior, size_t* out) {
  GP_REQUIRE(posterior);
  GP_REQUIRE(out);
  *out = posterior->result.support.size();
  last_error.clear();
  return GP_OK;
}

gp_status gp_posterior_support(const gp_posterior* posterior, size_t index, double* support,
                               double* weight) {
  GP_REQUIRE(posterior);
  const PosteriorResult& r = posterior->result;
  if (index >= r.support.size()) return fail(GP_ERR_OUT_OF_RANGE, "support index out of range");
  if (support) *support = r.support[index];
  if (weight) *weight = r.weights[index];
  last_error.clear();
  return GP_OK;
}

void gp_posterior_destroy(gp_posterior* posterior) { delete posterior; }

gp_status gp_summary_to_se(double or_point, double ci_low, double ci_high, double level,
                           double* se) {
  GP_REQUIRE(se);
  return guarded([&] { *se = summary_to_se(or_point, ci_low, ci_high, level, warning_handler()); });
}

const char* gp_dietary_csv(void) {
  static const std::string csv(dietary_csv());
  return csv.c_str();
}

gp_status gp_sim_config_create(gp_study kind, gp_sim_config** out) {
  GP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    SimulationConfig c;
    switch (kind) {
      case GP_STUDY_TYPE1: c.kind = StudyKind::TypeOne; break;
      case GP_STUDY_POWER: c.kind = StudyKind::Power; break;
      case GP_STUDY_SELECTION:
        c.kind = StudyKind::Selection;
        c.replicates = 500;
        break;
      default: raise(ErrorCode::InvalidArgument, "unknown study kind");
    }
    *out = new gp_sim_config{c};
  });
}

gp_status gp_sim_config_add_n_cases(gp_sim_config* config, int64_t n_cases) {
  GP_REQUIRE(config);
  config->config.n_cases.push_back(n_cases);
  return GP_OK;
}

gp_status gp_sim_config_set_replicates(gp_sim_config* config, int64_t replicates) {
  GP_REQUIRE(config);
  config->config.replicates = replicates;
  return GP_OK;
}

gp_status gp_sim_config_set_seed(gp_sim_config* config, uint64_t seed) {
  GP_REQUIRE(config);
  config->config.seed = seed;
  return GP_OK;
}

gp_status gp_sim_config_set_alpha(gp_sim_config* config, double alpha) {
  GP_REQUIRE(config);
  config->config.alpha = alpha;
  return GP_OK;
}

gp_status gp_sim_config_set_n_tests(gp_sim_config* config, int64_t n_tests) {
  GP_REQUIRE(config);
  config->config.n_tests = n_tests;
  return GP_OK;
}

gp_status gp_sim_config_set_scale(gp_sim_config* config, gp_scale scale) {
  GP_REQUIRE(config);
  return guarded([&] { config->config.scale = to_scale(scale); });
}

gp_status gp_sim_config_set_credibility(gp_sim_config* config, double credibility) {
  GP_REQUIRE(config);
  config->config.credibility = credibility;
  return GP_OK;
}

gp_status gp_sim_config_set_threads(gp_sim_config* config, unsigned threads) {
  GP_REQUIRE(config);
  config->config.threads = threads;
  return GP_OK;
}

gp_status gp_sim_config_add_fixed_effect(gp_sim_config* config, double log_or) {
  GP_REQUIRE(config);
  return guarded([&] { config->config.effects.emplace_back(FixedEffect{log_or}); });
}

gp_status gp_sim_config_add_normal_effect(gp_sim_config* config, double tau) {
  GP_REQUIRE(config);
  return guarded([&] { config->config.effects.emplace_back(NormalEffect{tau}); });
}

gp_status gp_sim_config_add_mixture_effect(gp_sim_config* config, double pi0, double tau,
                                           double truncation, int bins) {
  GP_REQUIRE(config);
  return guarded(
      [&] { config->config.effects.emplace_back(MixtureEffect{pi0, tau, truncation, bins}); });
}

gp_status gp_sim_config_validate(const gp_sim_config* config) {
  GP_REQUIRE(config);
  return guarded([&] { validate(config->config); });
}

void gp_sim_config_destroy(gp_sim_config* config) { delete config; }

double gp_default_tau(void) { return default_tau(); }

gp_status gp_simulate(const gp_sim_config* config, gp_report** out) {
  GP_REQUIRE(config);
  GP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new gp_report{run_study(config->config)}; });
}

gp_status gp_report_size(const gp_report* report, size_t* out) {
  GP_REQUIRE(report);
  GP_REQUIRE(out);
  *out = report->report.rows.size();
  return GP_OK;
}

gp_status gp_report_row_get(const gp_report* report, size_t index, gp_report_row* out) {
  GP_REQUIRE(report);
  GP_REQUIRE(out);
  const auto& rows = report->report.rows;
  if (index >= rows.size()) return fail(GP_ERR_OUT_OF_RANGE, "row index out of range");
  const StudyRow& r = rows[index];
  *out = {r.effect.c_str(),
          r.n_cases,
          r.n_tests,
          r.replicates,
          r.rejection_rate_z,
          r.rejection_rate_t,
          r.mc_se_z,
          r.mc_se_t,
          r.t_excluded,
          r.true_mean_gamma_prime,
          r.posterior_mean_gamma_prime,
          r.frequentist_mean_gamma_prime,
          r.hpd_coverage,
          r.mc_se_true,
          r.mc_se_posterior,
          r.mc_se_frequentist,
          r.mc_se_coverage};
  return GP_OK;
}

gp_status gp_report_render(const gp_report* report, gp_format format, char** out) {
  GP_REQUIRE(report);
  GP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    switch (format) {
      case GP_FORMAT_TEXT: *out = duplicate(render_text(report->report)); break;
      case GP_FORMAT_CSV: *out = duplicate(render_csv(report->report)); break;
      case GP_FORMAT_JSON: *out = duplicate(render_json(report->report)); break;
      default: raise(ErrorCode::InvalidArgument, "unknown format");
    }
  });
}

void gp_report_destroy(gp_report* report) { delete report; }

void gp_free_string(char* text) { std::free(text); }

}  // extern "C"

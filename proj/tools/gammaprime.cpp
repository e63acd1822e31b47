// Command-line front end; talks to the library only through the C API.
#include <gammaprime/gammaprime.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRowFailures = 1;
constexpr int kExitUsage = 2;

// Thrown for invalid configuration; maps to the usage exit code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(gp_status status) {
  if (status != GP_OK) {
    throw ApiError(std::string(gp_status_string(status)) + ": " + gp_last_error());
  }
}

template <typename T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using TablePtr = std::unique_ptr<gp_table, Deleter<gp_table, gp_table_destroy>>;
using PriorPtr = std::unique_ptr<gp_prior, Deleter<gp_prior, gp_prior_destroy>>;
using PosteriorPtr = std::unique_ptr<gp_posterior, Deleter<gp_posterior, gp_posterior_destroy>>;
using ConfigPtr = std::unique_ptr<gp_sim_config, Deleter<gp_sim_config, gp_sim_config_destroy>>;
using ReportPtr = std::unique_ptr<gp_report, Deleter<gp_report, gp_report_destroy>>;

std::string num(double x) {
  if (std::isnan(x)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// Rounded to the same 10 significant digits as the text and CSV output.
nlohmann::json json_num(double x) {
  if (std::isnan(x)) return nullptr;
  return std::stod(num(x));
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> to_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool skippable(const std::string& line) {
  const std::string t = trim(line);
  return t.empty() || t.front() == '#';
}

enum class Format { Text, Csv, Json };

const std::map<std::string, Format> kFormats{
    {"text", Format::Text}, {"csv", Format::Csv}, {"json", Format::Json}};

// A simple aligned table for human output.
std::string align(const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) {
      width[i] = std::max(width[i], r[i].size());
    }
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out << "  ";
      out << std::string(width[i] - r[i].size(), ' ') << r[i];
    }
    out << '\n';
  };
  emit(header);
  for (const auto& r : rows) emit(r);
  return out.str();
}

std::string render_rows(Format format, const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows,
                        const std::vector<nlohmann::json>& json_rows) {
  switch (format) {
    case Format::Text: return align(header, rows);
    case Format::Csv: {
      std::ostringstream out;
      for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
      out << '\n';
      for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
        out << '\n';
      }
      return out.str();
    }
    case Format::Json: return nlohmann::json(json_rows).dump(2) + "\n";
  }
  return {};
}

void print_warning(const char* message, void*) { std::cerr << "warning: " << message << '\n'; }

// ---- constants -----------------------------------------------------------

int cmd_constants(Format format) {
  gp_constants c{};
  check(gp_get_constants(&c));
  const std::pair<const char*, double> items[] = {
      {"psi_star", c.psi_star}, {"max_log_or", c.max_log_or}, {"llc", c.llc}, {"max_or", c.max_or}};
  if (format == Format::Json) {
    nlohmann::json j;
    for (const auto& [name, value] : items) j[name] = json_num(value);
    std::cout << j.dump(2) << '\n';
    return kExitOk;
  }
  if (format == Format::Csv) std::cout << "name,value\n";
  for (const auto& [name, value] : items) {
    char buf[64];
    if (format == Format::Csv) {
      std::snprintf(buf, sizeof buf, "%s,%.10g", name, value);
    } else {
      std::snprintf(buf, sizeof buf, "%-12s %.10g", name, value);
    }
    std::cout << buf << '\n';
  }
  return kExitOk;
}

// ---- analyze -------------------------------------------------------------

struct AnalyzeOptions {
  std::string input;
  std::vector<std::string> rows;
  bool no_correct = false;
};

int cmd_analyze(const AnalyzeOptions& opt, Format format) {
  std::vector<std::pair<std::string, std::string>> inputs;  // (location, line)
  if (!opt.input.empty()) {
    const auto lines = split_lines(read_input(opt.input));
    for (std::size_t i = 0; i < lines.size(); ++i) {
      inputs.emplace_back("line " + std::to_string(i + 1), lines[i]);
    }
  }
  for (std::size_t i = 0; i < opt.rows.size(); ++i) {
    inputs.emplace_back("row " + std::to_string(i + 1), opt.rows[i]);
  }
  if (inputs.empty()) throw UsageError("analyze needs an input file or --row");

  const std::vector<std::string> header{
      "source", "n11", "n12", "n21", "n22", "corrected", "log_or", "se_log_or", "gamma_prime",
      "se_gamma_prime", "z", "p_z", "t", "p_t", "log_or_uncorrected", "z_uncorrected"};
  std::vector<std::vector<std::string>> rows;
  std::vector<nlohmann::json> json_rows;
  int failures = 0;
  bool header_allowed = true;
  for (const auto& [where, line] : inputs) {
    if (skippable(line)) continue;
    const auto fields = split_csv(line);
    if (header_allowed && trim(line) == "n11,n12,n21,n22") {
      header_allowed = false;
      continue;
    }
    header_allowed = false;
    try {
      if (fields.size() != 4) throw ApiError("expected 4 comma-separated counts");
      double cells[4];
      for (int i = 0; i < 4; ++i) {
        const auto v = to_double(fields[static_cast<std::size_t>(i)]);
        if (!v) throw ApiError("cannot parse count '" + fields[static_cast<std::size_t>(i)] + "'");
        cells[i] = *v;
      }
      gp_table* raw_handle = nullptr;
      check(gp_table_create(cells[0], cells[1], cells[2], cells[3], &raw_handle));
      TablePtr raw(raw_handle);

      // Uncorrected quantities when every cell is positive.
      double raw_log_or = NAN, raw_z = NAN;
      gp_analysis raw_analysis{};
      if (cells[0] > 0 && cells[1] > 0 && cells[2] > 0 && cells[3] > 0 &&
          gp_table_analyze(raw.get(), &raw_analysis) == GP_OK) {
        raw_log_or = raw_analysis.log_or;
        raw_z = raw_analysis.z;
      }
      TablePtr used;
      if (opt.no_correct) {
        used = std::move(raw);
      } else {
        gp_table* corrected = nullptr;
        check(gp_table_haldane(raw.get(), &corrected));
        used.reset(corrected);
      }
      gp_analysis a{};
      check(gp_table_analyze(used.get(), &a));
      rows.push_back({where, num(cells[0]), num(cells[1]), num(cells[2]), num(cells[3]),
                      opt.no_correct ? "no" : "yes", num(a.log_or), num(a.se_log_or),
                      num(a.gamma_prime), num(a.se_gamma_prime), num(a.z), num(a.p_z), num(a.t),
                      num(a.p_t), num(raw_log_or), num(raw_z)});
      json_rows.push_back({{"source", where},
                           {"cells", {cells[0], cells[1], cells[2], cells[3]}},
                           {"corrected", !opt.no_correct},
                           {"log_or", json_num(a.log_or)},
                           {"se_log_or", json_num(a.se_log_or)},
                           {"gamma_prime", json_num(a.gamma_prime)},
                           {"se_gamma_prime", json_num(a.se_gamma_prime)},
                           {"z", json_num(a.z)},
                           {"p_z", json_num(a.p_z)},
                           {"t", json_num(a.t)},
                           {"p_t", json_num(a.p_t)},
                           {"log_or_uncorrected", json_num(raw_log_or)},
                           {"z_uncorrected", json_num(raw_z)}});
    } catch (const ApiError& e) {
      ++failures;
      std::cerr << "error: " << where << ": " << e.what() << '\n';
    }
  }
  std::cout << render_rows(format, header, rows, json_rows);
  return failures ? kExitRowFailures : kExitOk;
}

// ---- posterior -----------------------------------------------------------

struct PosteriorOptions {
  std::string summaries;
  bool dietary = false;
  std::string table;
  std::vector<double> pi0{0.5};
  double tau = 0.42;
  double trunc = 4.8;
  int bins = 100;
  std::string prior_file;
  std::string scale = "gammaprime";
  double cred = 0.95;
  std::string sided = "one";
  bool no_correct = false;
};

struct Record {
  std::string label;
  double log_or;
  double se;
  std::string error;
};

std::vector<Record> parse_summaries(const std::string& text, const std::string& origin) {
  std::vector<Record> out;
  const auto lines = split_lines(text);
  bool header_seen = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (skippable(lines[i])) continue;
    const auto fields = split_csv(lines[i]);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() == 5 && fields[0] == "label") continue;
    }
    Record r;
    const std::string where = origin + " line " + std::to_string(i + 1);
    r.label = fields.empty() ? "" : fields[0];
    if (fields.size() != 5) {
      r.error = where + ": expected label,or,ci_low,ci_high,ci_level";
      out.push_back(r);
      continue;
    }
    const auto or_point = to_double(fields[1]), lo = to_double(fields[2]),
               hi = to_double(fields[3]), level = to_double(fields[4]);
    if (!or_point || !lo || !hi || !level) {
      r.error = where + ": cannot parse numeric fields";
      out.push_back(r);
      continue;
    }
    double se = 0.0;
    const gp_status st = gp_summary_to_se(*or_point, *lo, *hi, *level, &se);
    if (st != GP_OK) {
      r.error = where + ": " + gp_last_error();
    } else {
      r.log_or = std::log(*or_point);
      r.se = se;
    }
    out.push_back(r);
  }
  return out;
}

int cmd_posterior(const PosteriorOptions& opt, Format format) {
  gp_scale scale;
  if (opt.scale == "logor") {
    scale = GP_SCALE_LOG_OR;
  } else if (opt.scale == "gammaprime") {
    scale = GP_SCALE_GAMMA_PRIME;
  } else {
    throw UsageError("--scale must be logor or gammaprime");
  }
  gp_sided sided;
  if (opt.sided == "one") {
    sided = GP_ONE_SIDED;
  } else if (opt.sided == "two") {
    sided = GP_TWO_SIDED;
  } else {
    throw UsageError("--sided must be one or two");
  }

  std::vector<Record> records;
  if (opt.dietary) {
    auto r = parse_summaries(gp_dietary_csv(), "dietary");
    records.insert(records.end(), r.begin(), r.end());
  }
  if (!opt.summaries.empty()) {
    auto r = parse_summaries(read_input(opt.summaries), opt.summaries);
    records.insert(records.end(), r.begin(), r.end());
  }
  if (!opt.table.empty()) {
    const auto fields = split_csv(opt.table);
    double cells[4];
    if (fields.size() != 4) throw UsageError("--table takes n11,n12,n21,n22");
    for (int i = 0; i < 4; ++i) {
      const auto v = to_double(fields[static_cast<std::size_t>(i)]);
      if (!v) throw UsageError("--table: cannot parse '" + fields[static_cast<std::size_t>(i)] + "'");
      cells[i] = *v;
    }
    Record r;
    r.label = "table";
    gp_table* raw = nullptr;
    if (gp_table_create(cells[0], cells[1], cells[2], cells[3], &raw) != GP_OK) {
      r.error = std::string("table: ") + gp_last_error();
    } else {
      TablePtr owner(raw);
      TablePtr used;
      gp_table* corrected = nullptr;
      if (!opt.no_correct && gp_table_haldane(raw, &corrected) == GP_OK) used.reset(corrected);
      gp_analysis a{};
      if (gp_table_analyze(used ? used.get() : raw, &a) != GP_OK) {
        r.error = std::string("table: ") + gp_last_error();
      } else {
        r.log_or = a.log_or;
        r.se = a.se_log_or;
      }
    }
    records.push_back(r);
  }
  if (records.empty()) throw UsageError("posterior needs --summaries, --dietary or --table");

  struct PriorChoice {
    std::string label;
    PriorPtr prior;
  };
  std::vector<PriorChoice> priors;
  if (!opt.prior_file.empty()) {
    gp_prior* p = nullptr;
    if (gp_prior_load(opt.prior_file.c_str(), &p) != GP_OK) {
      throw UsageError(std::string("prior file: ") + gp_last_error());
    }
    priors.push_back({"file", PriorPtr(p)});
  } else {
    for (double pi0 : opt.pi0) {
      gp_prior* p = nullptr;
      if (gp_prior_default(pi0, opt.tau, opt.trunc, opt.bins, &p) != GP_OK) {
        throw UsageError(std::string("prior: ") + gp_last_error());
      }
      priors.push_back({num(pi0), PriorPtr(p)});
    }
  }
  if (!(opt.cred > 0.0 && opt.cred < 1.0)) throw UsageError("--cred must lie in (0, 1)");

  double z_crit = 0.0;
  check(gp_normal_quantile(0.5 * (1.0 + opt.cred), &z_crit));
  const char* scale_name = scale == GP_SCALE_LOG_OR ? "logor" : "gammaprime";
  const std::vector<std::string> header{"label",    "odds_ratio", "gamma_prime", "ci_low",
                                        "ci_high",  "pi0",        "scale",       "post_mean",
                                        "hpd_low",  "hpd_high"};
  std::vector<std::vector<std::string>> rows;
  std::vector<nlohmann::json> json_rows;
  int failures = 0;
  for (const Record& rec : records) {
    if (!rec.error.empty()) {
      ++failures;
      std::cerr << "error: " << rec.error << '\n';
      continue;
    }
    double gp = NAN, se_gp = NAN;
    if (gp_gamma_prime(rec.log_or, &gp) != GP_OK ||
        gp_se_gamma_prime(rec.log_or, rec.se, &se_gp) != GP_OK) {
      ++failures;
      std::cerr << "error: " << rec.label << ": " << gp_last_error() << '\n';
      continue;
    }
    const double ci_low = gp - z_crit * se_gp, ci_high = gp + z_crit * se_gp;
    for (const PriorChoice& choice : priors) {
      gp_posterior* post = nullptr;
      if (gp_posterior_compute(choice.prior.get(), rec.log_or / rec.se, rec.se, sided, scale,
                               opt.cred, &post) != GP_OK) {
        ++failures;
        std::cerr << "error: " << rec.label << ": " << gp_last_error() << '\n';
        continue;
      }
      PosteriorPtr owner(post);
      gp_posterior_summary s{};
      check(gp_posterior_summary_get(post, &s));
      rows.push_back({rec.label, num(std::exp(rec.log_or)), num(gp), num(ci_low), num(ci_high),
                      choice.label, scale_name, num(s.mean), num(s.hpd_low), num(s.hpd_high)});
      json_rows.push_back({{"label", rec.label},
                           {"odds_ratio", json_num(std::exp(rec.log_or))},
                           {"gamma_prime", json_num(gp)},
                           {"ci_low", json_num(ci_low)},
                           {"ci_high", json_num(ci_high)},
                           {"pi0", choice.label},
                           {"scale", scale_name},
                           {"post_mean", json_num(s.mean)},
                           {"hpd_low", json_num(s.hpd_low)},
                           {"hpd_high", json_num(s.hpd_high)}});
    }
  }
  std::cout << render_rows(format, header, rows, json_rows);
  return failures ? kExitRowFailures : kExitOk;
}

// ---- simulate ------------------------------------------------------------

struct SimulateOptions {
  std::vector<std::int64_t> n_cases;
  std::optional<std::int64_t> reps;
  std::uint64_t seed = 1;
  double alpha = 0.05;
  std::vector<double> odds_ratios;
  std::vector<double> taus;
  std::optional<std::int64_t> tests;
  double pi0 = 0.8;
  double trunc = 4.8;
  int bins = 100;
  unsigned threads = 0;
  bool full_scale = false;
  std::string scale = "logor";
  double cred = 0.95;
  std::string out;
};

int cmd_simulate(gp_study kind, const SimulateOptions& opt, Format format) {
  gp_sim_config* raw = nullptr;
  check(gp_sim_config_create(kind, &raw));
  ConfigPtr config(raw);

  std::vector<std::int64_t> n_cases = opt.n_cases;
  if (n_cases.empty()) {
    n_cases = kind == GP_STUDY_SELECTION ? std::vector<std::int64_t>{500}
                                         : std::vector<std::int64_t>{25, 50, 100, 250, 500, 1000, 5000};
  }
  for (auto n : n_cases) check(gp_sim_config_add_n_cases(config.get(), n));

  std::int64_t reps = kind == GP_STUDY_SELECTION ? (opt.full_scale ? 10000 : 500)
                                                 : (opt.full_scale ? 1000000 : 100000);
  if (opt.reps) reps = *opt.reps;
  check(gp_sim_config_set_replicates(config.get(), reps));
  check(gp_sim_config_set_seed(config.get(), opt.seed));
  check(gp_sim_config_set_alpha(config.get(), opt.alpha));
  check(gp_sim_config_set_threads(config.get(), opt.threads));
  check(gp_sim_config_set_credibility(config.get(), opt.cred));
  if (opt.scale == "logor") {
    check(gp_sim_config_set_scale(config.get(), GP_SCALE_LOG_OR));
  } else if (opt.scale == "gammaprime") {
    check(gp_sim_config_set_scale(config.get(), GP_SCALE_GAMMA_PRIME));
  } else {
    throw UsageError("--scale must be logor or gammaprime");
  }

  switch (kind) {
    case GP_STUDY_TYPE1:
      if (!opt.odds_ratios.empty() || !opt.taus.empty()) {
        throw UsageError("type1 runs under OR = 1; --or and --tau do not apply");
      }
      break;
    case GP_STUDY_POWER:
      for (double r : opt.odds_ratios) {
        if (!(r > 0.0)) throw UsageError("--or must be positive");
        check(gp_sim_config_add_fixed_effect(config.get(), std::log(r)));
      }
      for (double t : opt.taus) check(gp_sim_config_add_normal_effect(config.get(), t));
      break;
    case GP_STUDY_SELECTION: {
      if (!opt.odds_ratios.empty()) throw UsageError("--or does not apply to selection");
      if (opt.taus.size() > 1) throw UsageError("selection takes a single --tau");
      const double tau = opt.taus.empty() ? gp_default_tau() : opt.taus.front();
      check(gp_sim_config_add_mixture_effect(config.get(), opt.pi0, tau, opt.trunc, opt.bins));
      check(gp_sim_config_set_n_tests(config.get(), opt.tests.value_or(10000)));
      break;
    }
  }
  if (gp_sim_config_validate(config.get()) != GP_OK) throw UsageError(gp_last_error());

  gp_report* report_raw = nullptr;
  check(gp_simulate(config.get(), &report_raw));
  ReportPtr report(report_raw);

  auto render = [&](gp_format f) {
    char* text = nullptr;
    check(gp_report_render(report.get(), f, &text));
    std::string s(text);
    gp_free_string(text);
    return s;
  };
  if (!opt.out.empty()) {
    for (const auto& [suffix, f] : {std::pair{".csv", GP_FORMAT_CSV}, std::pair{".txt", GP_FORMAT_TEXT}}) {
      std::ofstream file(opt.out + suffix, std::ios::binary);
      if (!file) throw ApiError("cannot write " + opt.out + suffix);
      file << render(f);
    }
  }
  const gp_format f = format == Format::Csv    ? GP_FORMAT_CSV
                      : format == Format::Json ? GP_FORMAT_JSON
                                               : GP_FORMAT_TEXT;
  std::cout << render(f);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  gp_set_warning_handler(print_warning, nullptr);

  CLI::App app{"Odds-ratio effect sizes on the gamma-prime scale"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI configuration file; sections name subcommands");
  app.allow_config_extras(CLI::config_extras_mode::error);
  Format format = Format::Text;
  app.add_option("--format", format, "Output format")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case))
      ->capture_default_str();

  const auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")
        ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
  };

  auto* constants = app.add_subcommand("constants", "Print the gamma-prime constants");
  add_format(constants);

  AnalyzeOptions analyze_opt;
  auto* analyze = app.add_subcommand("analyze", "Analyze 2x2 tables (CSV n11,n12,n21,n22)");
  analyze->add_option("input", analyze_opt.input, "CSV file, or - for stdin");
  analyze->add_option("--row", analyze_opt.rows, "A table given inline as n11,n12,n21,n22");
  analyze->add_flag("--no-correct", analyze_opt.no_correct, "Skip the Haldane correction");
  add_format(analyze);

  PosteriorOptions post_opt;
  auto* posterior = app.add_subcommand("posterior", "Posterior inference for published ORs");
  posterior->add_option("--summaries", post_opt.summaries,
                        "CSV label,or,ci_low,ci_high,ci_level (- for stdin)");
  posterior->add_flag("--dietary", post_opt.dietary, "Use the bundled dietary dataset");
  posterior->add_option("--table", post_opt.table, "A single table n11,n12,n21,n22");
  posterior->add_flag("--no-correct", post_opt.no_correct, "Skip the Haldane correction");
  posterior->add_option("--pi0", post_opt.pi0, "Prior null probabilities")
      ->delimiter(',')
      ->capture_default_str();
  posterior->add_option("--tau", post_opt.tau, "Prior SD of log(OR)")->capture_default_str();
  posterior->add_option("--trunc", post_opt.trunc, "Prior truncation")->capture_default_str();
  posterior->add_option("--bins", post_opt.bins, "Prior bins")->capture_default_str();
  posterior->add_option("--prior-file", post_opt.prior_file, "Prior CSV midpoint,probability")
      ->check(CLI::ExistingFile);
  posterior->add_option("--scale", post_opt.scale, "logor or gammaprime")->capture_default_str();
  posterior->add_option("--cred", post_opt.cred, "Credibility level")->capture_default_str();
  posterior->add_option("--sided", post_opt.sided, "one or two")->capture_default_str();
  add_format(posterior);

  SimulateOptions sim_opt;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo studies");
  simulate->require_subcommand(1);
  auto add_sim_options = [&](CLI::App* sub) {
    sub->add_option("--n-cases", sim_opt.n_cases, "Numbers of cases")->delimiter(',');
    sub->add_option("--reps", sim_opt.reps, "Replicates per setting");
    sub->add_option("--seed", sim_opt.seed, "Random seed")->capture_default_str();
    sub->add_option("--alpha", sim_opt.alpha, "Two-sided test size")->capture_default_str();
    sub->add_option("--threads", sim_opt.threads, "Worker threads (0 = all)");
    sub->add_flag("--full-scale", sim_opt.full_scale, "Use the full replicate counts");
    sub->add_option("--out", sim_opt.out, "Also write PREFIX.csv and PREFIX.txt");
    add_format(sub);
  };
  auto* type1 = simulate->add_subcommand("type1", "Type-I error under OR = 1");
  add_sim_options(type1);
  auto* power = simulate->add_subcommand("power", "Power for fixed ORs or Normal(0, tau) effects");
  add_sim_options(power);
  power->add_option("--or", sim_opt.odds_ratios, "Fixed odds ratios")->delimiter(',');
  power->add_option("--tau", sim_opt.taus, "SDs of a Normal(0, tau) log(OR)")->delimiter(',');
  auto* selection = simulate->add_subcommand("selection", "Largest |Z| of L tests");
  add_sim_options(selection);
  selection->add_option("--tests", sim_opt.tests, "Number of tests L");
  selection->add_option("--tau", sim_opt.taus, "Prior SD of log(OR)");
  selection->add_option("--pi0", sim_opt.pi0, "Prior null probability")->capture_default_str();
  selection->add_option("--trunc", sim_opt.trunc, "Prior truncation")->capture_default_str();
  selection->add_option("--bins", sim_opt.bins, "Prior bins")->capture_default_str();
  selection->add_option("--scale", sim_opt.scale, "Scale for HPD coverage")->capture_default_str();
  selection->add_option("--cred", sim_opt.cred, "Credibility level")->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*constants) return cmd_constants(format);
    if (*analyze) return cmd_analyze(analyze_opt, format);
    if (*posterior) return cmd_posterior(post_opt, format);
    if (*type1) return cmd_simulate(GP_STUDY_TYPE1, sim_opt, format);
    if (*power) return cmd_simulate(GP_STUDY_POWER, sim_opt, format);
    if (*selection) return cmd_simulate(GP_STUDY_SELECTION, sim_opt, format);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRowFailures;
  }
  return kExitUsage;
}

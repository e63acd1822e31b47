#include "gammaprime/contab.hpp"

#include <cmath>
#include <string>

#include "gammaprime/error.hpp"

namespace gammaprime {

namespace {

void require_positive_cells(const ContingencyTable& t, const char* who) {
  if (t.n_cases() <= 0.0 || t.n_controls() <= 0.0) {
    raise(ErrorCode::DegenerateTable,
          std::string(who) + ": table has an empty case or control row");
  }
  if (!t.strictly_positive()) {
    raise(ErrorCode::Domain,
          std::string(who) + ": zero cell; apply the Haldane-Anscombe correction first");
  }
}

}  // namespace

ContingencyTable ContingencyTable::from_counts(double n11, double n12, double n21,
                                               double n22) {
  for (double cell : {n11, n12, n21, n22}) {
    if (!std::isfinite(cell) || cell < 0.0) {
      raise(ErrorCode::Domain, "table cells must be finite and nonnegative");
    }
  }
  if (n11 + n12 + n21 + n22 == 0.0) {
    raise(ErrorCode::DegenerateTable, "table has no observations");
  }
  return ContingencyTable(n11, n12, n21, n22, false);
}

ContingencyTable ContingencyTable::swapped_rows_and_columns() const noexcept {
  return ContingencyTable(n22_, n21_, n12_, n11_, corrected_);
}

ContingencyTable ContingencyTable::swapped_rows() const noexcept {
  return ContingencyTable(n21_, n22_, n11_, n12_, corrected_);
}

ContingencyTable haldane_correct(const ContingencyTable& table) {
  if (table.corrected()) {
    raise(ErrorCode::AlreadyCorrected, "Haldane-Anscombe correction applied twice");
  }
  if (table.n_cases() <= 0.0 || table.n_controls() <= 0.0) {
    raise(ErrorCode::DegenerateTable, "haldane_correct: refusing to correct an empty row");
  }
  return ContingencyTable(table.n11() + 0.5, table.n12() + 0.5, table.n21() + 0.5,
                          table.n22() + 0.5, true);
}

SampleEstimates estimates(const ContingencyTable& table) {
  require_positive_cells(table, "estimates");
  const double cases = table.n_cases();
  const double controls = table.n_controls();

  SampleEstimates e{};
  e.n_total = table.n_total();
  e.p_hat = table.n11() / cases;
  e.q_hat = table.n21() / controls;
  e.w_hat = cases / e.n_total;
  const double var = 1.0 / e.w_hat / (e.p_hat * (1.0 - e.p_hat)) +
                     1.0 / (1.0 - e.w_hat) / (e.q_hat * (1.0 - e.q_hat));
  e.sigma_hat = std::sqrt(var);
  return e;
}

double woolf_se(const ContingencyTable& table) {
  require_positive_cells(table, "woolf_se");
  return std::sqrt(1.0 / table.n11() + 1.0 / table.n12() + 1.0 / table.n21() +
                   1.0 / table.n22());
}

}  // namespace gammaprime

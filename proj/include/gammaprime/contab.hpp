#pragma once

namespace gammaprime {

/// 2x2 case/exposure table.
///
///                 exposed   unexposed
///     cases        n11        n12
///     controls     n21        n22
///
/// Cells are reals so the Haldane-Anscombe +1/2 is carried exactly.
class ContingencyTable {
 public:
  /// Uncorrected table. Throws Domain on a negative or non-finite cell and
  /// DegenerateTable when every cell is zero.
  static ContingencyTable from_counts(double n11, double n12, double n21, double n22);

  double n11() const noexcept { return n11_; }
  double n12() const noexcept { return n12_; }
  double n21() const noexcept { return n21_; }
  double n22() const noexcept { return n22_; }

  double n_cases() const noexcept { return n11_ + n12_; }
  double n_controls() const noexcept { return n21_ + n22_; }
  double n_total() const noexcept { return n11_ + n12_ + n21_ + n22_; }
  bool corrected() const noexcept { return corrected_; }
  bool strictly_positive() const noexcept {
    return n11_ > 0 && n12_ > 0 && n21_ > 0 && n22_ > 0;
  }

  /// Cases and controls exchanged and exposure labels flipped; log(OR) is
  /// preserved.
  ContingencyTable swapped_rows_and_columns() const noexcept;
  /// Cases and controls exchanged; log(OR) changes sign.
  ContingencyTable swapped_rows() const noexcept;

  friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;

 private:
  ContingencyTable(double n11, double n12, double n21, double n22, bool corrected) noexcept
      : n11_(n11), n12_(n12), n21_(n21), n22_(n22), corrected_(corrected) {}

  friend ContingencyTable haldane_correct(const ContingencyTable& table);

  double n11_;
  double n12_;
  double n21_;
  double n22_;
  bool corrected_;
};

/// Adds 1/2 to every cell. Refuses a table that has already been corrected
/// (AlreadyCorrected) or has an empty case or control row (DegenerateTable).
ContingencyTable haldane_correct(const ContingencyTable& table);

/// Plug-in quantities every statistic consumes.
struct SampleEstimates {
  double p_hat;      ///< exposure among cases, n11 / n_D
  double q_hat;      ///< exposure among controls, n21 / n_Dbar
  double w_hat;      ///< proportion of cases, n_D / N
  double n_total;    ///< N
  double sigma_hat;  ///< per-observation SD of log(OR)-hat
};

/// Throws DegenerateTable when a row is empty and Domain when a cell is zero
/// (correct the table first).
SampleEstimates estimates(const ContingencyTable& table);

/// Woolf standard error sqrt(sum 1/n_ij). Throws Domain on a zero cell.
double woolf_se(const ContingencyTable& table);

}  // namespace gammaprime

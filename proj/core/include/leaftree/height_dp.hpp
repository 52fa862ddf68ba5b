#pragma once

#include "leaftree/split_kernel.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace leaftree {

// The DP would need more table cells than DpOptions::max_cells allows.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DpOptions {
  // Stop once the target size's tail P(H_n > h) is at most this; 0 runs to h = n - 1.
  double tail_tol = 1e-12;
  // When > 1, the stopping test bounds the neglected part of E(base^H) instead:
  // base^(n-1) * P(H_n > h) <= tail_tol * (accumulated moment).
  double weight_base = 1.0;
  std::size_t max_cells = 50'000'000;
};

// E(beta^H), carried as a logarithm so that large moments stay representable.
struct Moment {
  double log_value = 0.0;

  double value() const { return std::exp(log_value); }
  bool overflows() const;
};

// Tail probabilities P(H_m > h) for every size m <= n_max, filled layer by layer in h.
//
// The recurrence runs on tails rather than on the CDF, so the far tail that drives
// exponential moments keeps full relative precision:
//   P(H_m > h) = sum_k sigma(k, m - k) * (a + b (1 - a)),
//   a = P(H_k > h - 1), b = P(H_{m-k} > h - 1).
class HeightTable {
 public:
  int max_size() const { return static_cast<int>(tails_.size()) - 1; }
  int layers() const { return layers_; }

  // Stored tails of size m for h = 0, 1, ...; entries for h >= m - 1 are zero and
  // never stored.
  std::span<const double> tails(int m) const { return tails_.at(m); }

  // True when every omitted tail of size m is exactly zero.
  bool complete(int m) const;

  // P(H_m > h). Past a truncation point this returns the last computed tail,
  // which bounds the true value from above.
  double tail(int m, int h) const;

  // Largest h for which tail(m, h) was computed (m - 1 when complete).
  int cut(int m) const;

  // sum_h P(H_m > h) over computed layers.
  double expected_height(int m) const;

  // E(beta^{H_m}) = 1 + (beta - 1) sum_h beta^h P(H_m > h) over computed layers.
  Moment exp_moment(int m, double beta) const;

 private:
  friend HeightTable build_height_table(const SplitKernel&, int, const DpOptions&);
  std::vector<std::vector<double>> tails_;
  int layers_ = 0;
};

HeightTable build_height_table(const SplitKernel& kernel, int n_max,
                               const DpOptions& options = {});

struct HeightCdf {
  int n = 1;
  std::vector<double> values;  // values[h] = P(H_n <= h), 0 <= h <= h_cut
  double tail_mass = 0.0;      // 1 - values[h_cut]
  double tail_tol = 0.0;

  int h_cut() const { return static_cast<int>(values.size()) - 1; }
};

HeightCdf height_cdf(const SplitKernel& kernel, int n, double tail_tol,
                     std::size_t max_cells = DpOptions{}.max_cells);

struct HeightEstimate {
  double value = 0.0;
  // Upper bound on the neglected part: tail_mass * (n - 1 - h_cut).
  double error_bound = 0.0;
  int h_cut = 0;
  double tail_mass = 0.0;
};

HeightEstimate expected_height(const SplitKernel& kernel, int n, double tail_tol = 1e-12,
                               std::size_t max_cells = DpOptions{}.max_cells);

// E(beta^{H_n}) for beta > 1 under the weighted truncation rule.
Moment exp_moment(const SplitKernel& kernel, int n, double beta, double tail_tol = 1e-12,
                  std::size_t max_cells = DpOptions{}.max_cells);

// Exhaustive oracles over T_n, exact in rational arithmetic; 1 <= n <= 12.
inline constexpr int kMaxBruteSize = 12;
std::vector<Rational> brute_height_pmf(const SplitKernel& kernel, int n);
Rational brute_expected_height(const SplitKernel& kernel, int n);

struct LemmaRow {
  int n = 0;
  double lhs_log = 0.0;  // log E(phi_n^{H_n})
  double rhs_log = 0.0;  // log of phi_n * sum_k sigma(k, n-k) (E_k + E_{n-k})
  double slack = 0.0;    // rhs - lhs, linear scale
  bool ok = true;
};

struct LemmaReport {
  std::vector<LemmaRow> rows;
  bool pass = true;
};

// Checks the recursive moment estimate for 2 <= n <= n_max. phi[k - 1] is the
// base used at size k; it must be nonincreasing with every entry > 1. Both sides
// are evaluated in 100-digit binary floating point over an exhaustive CDF table,
// with each kernel row renormalized at that precision, so the absolute slack is
// resolved while the moments stay below about 1e80. A row passes when
// slack >= -1e-9. Costs O(n_max^3) wide operations.
LemmaReport check_lemma_recursion(const SplitKernel& kernel, int n_max,
                                  std::span<const double> phi,
                                  std::size_t max_cells = DpOptions{}.max_cells);

}  // namespace leaftree

#pragma once

#include "leaftree/binary_tree.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace leaftree {

using Rational = boost::multiprecision::cpp_rational;

enum class KernelKind { bst, uniform, binomial, table };

std::string_view to_string(KernelKind kind);
std::optional<KernelKind> parse_kernel_kind(std::string_view name);

// Malformed or invalid kernel description.
class KernelSpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A kernel row whose mass is not a probability distribution.
class KernelRowError : public std::runtime_error {
 public:
  KernelRowError(int n, const std::string& what) : std::runtime_error(what), n_(n) {}
  int n() const { return n_; }

 private:
  int n_;
};

// Serializable description of a split kernel.
struct KernelSpec {
  KernelKind kind = KernelKind::bst;
  double p = 0.5;  // binomial only

  // Table kind only: rows[n] holds sigma(k, n - k) for k = 1..n-1.
  std::map<int, std::vector<double>> rows;
  KernelKind fallback = KernelKind::bst;
  double fallback_p = 0.5;  // used when fallback == binomial

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

struct KernelOptions {
  // Uniform kernel: exact Catalan ratios up to this n, log-space above.
  int uniform_exact_max_n = 30;
  // Rows for n <= this bound are memoized.
  int cache_max_n = 4096;
};

// One diagonal of sigma: pmf[k - 1] = sigma(k, n - k), cdf is its running sum.
struct SplitRow {
  int n = 0;
  std::vector<double> pmf;
  std::vector<double> cdf;
  double total = 0.0;      // compensated sum of pmf
  double min_value = 0.0;  // smallest entry
};

// The mapping sigma: N x N -> [0, 1] of a leaf-centric tree source.
//
// Immutable after construction. Copies share a row cache that is safe for
// concurrent readers; fills are serialized internally.
class SplitKernel {
 public:
  explicit SplitKernel(KernelSpec spec, KernelOptions options = {});

  static SplitKernel bst();
  static SplitKernel uniform(KernelOptions options = {});
  static SplitKernel binomial(double p);
  static SplitKernel table(std::map<int, std::vector<double>> rows, KernelKind fallback,
                           double fallback_p = 0.5);

  const KernelSpec& spec() const;
  const KernelOptions& options() const;
  KernelKind kind() const { return spec().kind; }

  // Kind used for size n (the fallback kind for uncovered table sizes).
  KernelKind effective_kind(int n) const;
  double effective_p(int n) const;

  // sigma(i, j) for i, j >= 1.
  double sigma(int i, int j) const;

  // Row for n >= 2; cached when n <= cache_max_n.
  std::shared_ptr<const SplitRow> row(int n) const;

  // Roundoff tolerance for row sums: 1e-12 for bst/uniform, 1e-9 otherwise.
  double default_tolerance() const;

  // Human-readable label, e.g. "binomial(0.3)".
  std::string label() const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

std::vector<double> split_pmf(const SplitKernel& kernel, int n);

struct RowCheck {
  int n = 0;
  double deviation = 0.0;  // |sum_k sigma(k, n - k) - 1|
  double min_value = 0.0;
  bool ok = true;
};

struct ValidationReport {
  double tolerance = 0.0;
  std::vector<RowCheck> rows;
  bool pass = true;
  std::optional<int> first_failure;
};

ValidationReport validate_kernel(const SplitKernel& kernel, int n_max, double tol);

struct TreeProbability {
  double probability = 1.0;
  double log_probability = 0.0;
};

// P_sigma(t): product of sigma over inner nodes, accumulated in log-space.
TreeProbability tree_probability(const SplitKernel& kernel, const BinaryTree& t);

// Exact sigma for the brute-force oracles. Floating parameters and table
// entries are taken at their exact binary value.
Rational exact_sigma(const SplitKernel& kernel, int i, int j);

KernelSpec parse_kernel_spec(std::string_view text);
std::string render_kernel_spec(const KernelSpec& spec);

SplitKernel load_kernel_spec(std::string_view text);
std::string render_kernel_spec(const SplitKernel& kernel);

}  // namespace leaftree

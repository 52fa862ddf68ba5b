#pragma once

#include "leaftree/height_dp.hpp"
#include "leaftree/sampler.hpp"
#include "leaftree/split_kernel.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace leaftree {

// Class L_up*(psi, N) with psi(x) = c * (x - shift)^(-alpha).
//
// shift = 0 is the power family; shift = 1 with c = 2, alpha = 1 is the exact
// binary-search-tree envelope 2 / (x - 1). The certificate always uses the
// power-family theta' in (c, alpha).
struct UpperBoundedParams {
  double c = 1.0;
  double alpha = 1.0;
  int N = 2;
  int shift = 0;

  double psi(double x) const;
};

// A nonincreasing phi: N -> (0, 1].
struct PhiFunction {
  enum class Form { constant, inverse_sqrt, table };
  Form form = Form::constant;
  double value = 0.5;          // constant phi0, or a in a * n^(-1/2)
  std::vector<double> values;  // table: phi(1), phi(2), ...; the last entry extends

  static PhiFunction constant(double phi0) { return {Form::constant, phi0, {}}; }
  static PhiFunction inverse_sqrt(double a) { return {Form::inverse_sqrt, a, {}}; }
  static PhiFunction table(std::vector<double> v) { return {Form::table, 0.0, std::move(v)}; }

  // Throws std::domain_error when the value leaves (0, 1].
  double operator()(int n) const;
  std::string describe() const;
};

// Class L_wbal(phi, gamma, N).
struct WeaklyBalancedParams {
  PhiFunction phi = PhiFunction::constant(0.5);
  double gamma = 0.25;
  int N = 2;
};

using ClassParams = std::variant<UpperBoundedParams, WeaklyBalancedParams>;

// max_i sigma(i, n - i) + sigma(n - i, i).
double psi_envelope(const SplitKernel& kernel, int n);

// sum of sigma(k, n - k) over integers gamma n <= k <= (1 - gamma) n.
double phi_balance(const SplitKernel& kernel, int n, double gamma);

// Leading term of the power-family height bound: e c n^(1 - alpha) / (1 - alpha) for alpha < 1,
// (e c - 1) ln n for alpha = 1.
double corollary_power_bound(double c, double alpha, int n);

// log theta'(x) and log theta(x) of the power family, theta(x) = exp(e * xi(x)).
double log_theta_prime(double c, double alpha, double x);
double log_theta(double c, double alpha, double x);

struct TheoremConditions {
  bool increasing = true;   // theta' nondecreasing on the sample grid
  bool dominates = true;    // e psi theta <= theta' on grid points >= N
  bool at_one = true;       // theta'(1) >= 1
  bool all() const { return increasing && dominates && at_one; }
};

// Natural-log certificate for the upper-bounded class.
struct Theorem1Certificate {
  double log_theta_prime = 0.0;
  double log_moment_bound = 0.0;  // ln(e^N theta'(n))
  double height_bound = 0.0;      // ln theta'(n) + N
  TheoremConditions conditions;
};

// Sample grid for the theorem conditions, covering [1, max(x_max, N)].
std::vector<double> condition_grid(double x_max, int N);
TheoremConditions check_theorem1_conditions(const UpperBoundedParams& params, double x_max);

Theorem1Certificate theorem1_certificate(const UpperBoundedParams& params, int n);

// log2(2 (1 + phi) / phi) / log2(1 / (1 - gamma)).
double kappa(double phi, double gamma);

// Binary-log certificate for the weakly-balanced class.
struct Theorem2Certificate {
  double phi = 0.0;
  double beta = 0.0;              // 1 + phi(n)
  double kappa = 0.0;
  double log_moment_bound = 0.0;  // ln(2^N n^kappa)
  double height_bound = 0.0;      // (kappa log2 n + N) / log2(1 + phi(n))
};

Theorem2Certificate theorem2_certificate(const WeaklyBalancedParams& params, int n);

// The DP behind verification always runs until every tail underflows (or to
// h = n - 1), because the moment bases differ per size.
struct VerifyOptions {
  std::size_t max_cells = DpOptions{}.max_cells;
  int mc_replicates = 0;  // 0 disables the Monte Carlo columns
  std::uint64_t seed = 0;
  SplitStrategy strategy = SplitStrategy::cdf_row;
};

struct BoundRow {
  int n = 0;
  double exact_eh = 0.0;
  std::optional<McEstimate> mc;
  double beta = 0.0;               // moment base: e, or 1 + phi(n)
  double moment_log = 0.0;         // ln E(beta^H)
  double moment_bound_log = 0.0;   // ln of the certificate's moment bound
  double height_bound = 0.0;
  double membership_value = 0.0;   // envelope or balance at n
  double membership_target = 0.0;  // psi(n) or phi(n)
  bool membership_ok = true;       // membership holds on every m in [N, n]
  bool moment_ok = true;
  bool height_ok = true;
  bool pass = true;
};

struct BoundReport {
  std::string kernel;
  std::string certificate;  // "upper-bounded" or "weakly-balanced"
  std::string log_base;     // "ln" or "log2"
  std::string params;
  int N = 0;
  bool N_empirical = false;
  std::optional<TheoremConditions> conditions;  // upper-bounded only
  std::vector<BoundRow> rows;
  bool pass = true;
  // Membership held on [N, n] but a certificate inequality failed somewhere.
  bool soundness_violation = false;
};

// Tolerance on each asserted inequality.
inline constexpr double kBoundSlack = 1e-9;

BoundReport verify_certificates(const SplitKernel& kernel, const ClassParams& params,
                                const std::vector<int>& n_grid, const VerifyOptions& options = {});

// Smallest N such that phi_balance(kernel, m, gamma) >= phi(m) for every m in
// [N, scan_max]; scan_max + 1 when it fails at scan_max.
int scan_balance_threshold(const SplitKernel& kernel, const PhiFunction& phi, double gamma,
                           int scan_max);

struct Preset {
  std::string name;
  SplitKernel kernel;
  ClassParams params;
  bool N_empirical = false;
};

// bst-upper, bst-wbal, bin-wbal[:p], uni-wbal. Empirical N values are scanned over
// [2, scan_max]. Throws std::invalid_argument for unknown names.
Preset make_preset(const std::string& name, int scan_max);
std::vector<std::string> preset_names();

std::string describe(const ClassParams& params);

}  // namespace leaftree

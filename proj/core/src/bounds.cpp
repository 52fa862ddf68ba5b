#include "leaftree/bounds.hpp"

#include "leaftree/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace leaftree {

namespace {

constexpr double kE = std::numbers::e;
constexpr double kConditionTol = 1e-12;
// Slack used when locating the integer range gamma n <= k <= (1 - gamma) n.
constexpr double kRangeEps = 1e-9;

void check_upper_params(const UpperBoundedParams& p) {
  if (!(p.c >= std::exp(-1.0) * (1.0 - 1e-12))) {
    throw std::invalid_argument("upper-bounded certificate requires c >= 1/e");
  }
  if (!(p.alpha >= 0.0 && p.alpha <= 1.0)) {
    throw std::invalid_argument("upper-bounded certificate requires 0 <= alpha <= 1");
  }
  if (p.N < 1) throw std::invalid_argument("N must be >= 1");
  if (p.shift != 0 && p.shift != 1) throw std::invalid_argument("psi shift must be 0 or 1");
  if (p.shift == 1 && p.N < 2) throw std::invalid_argument("psi shift 1 requires N >= 2");
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 0.5)) throw std::invalid_argument("gamma must lie in (0, 1/2)");
}

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

}  // namespace

double UpperBoundedParams::psi(double x) const {
  return c * std::pow(x - shift, -alpha);
}

double PhiFunction::operator()(int n) const {
  if (n < 1) throw std::invalid_argument("phi is defined for n >= 1");
  double v = 0.0;
  switch (form) {
    case Form::constant:
      v = value;
      break;
    case Form::inverse_sqrt:
      v = value / std::sqrt(static_cast<double>(n));
      break;
    case Form::table:
      if (values.empty()) throw std::invalid_argument("phi table is empty");
      v = values[std::min<std::size_t>(static_cast<std::size_t>(n), values.size()) - 1];
      break;
  }
  if (!(v > 0.0 && v <= 1.0)) {
    throw std::domain_error("phi(" + std::to_string(n) + ") = " + format_number(v) +
                            " is outside (0, 1]");
  }
  return v;
}

std::string PhiFunction::describe() const {
  switch (form) {
    case Form::constant: return "const:" + format_number(value);
    case Form::inverse_sqrt: return "inv-sqrt:" + format_number(value);
    case Form::table: return "table[" + std::to_string(values.size()) + "]";
  }
  return "?";
}

double psi_envelope(const SplitKernel& kernel, int n) {
  if (n < 2) throw std::invalid_argument("psi_envelope requires n >= 2");
  const auto row = kernel.row(n);
  double best = 0.0;
  for (int i = 1; i < n; ++i) best = std::max(best, row->pmf[i - 1] + row->pmf[n - i - 1]);
  return best;
}

double phi_balance(const SplitKernel& kernel, int n, double gamma) {
  if (n < 2) throw std::invalid_argument("phi_balance requires n >= 2");
  check_gamma(gamma);
  const int lo = std::max(1, static_cast<int>(std::ceil(gamma * n - kRangeEps)));
  const int hi = std::min(n - 1, static_cast<int>(std::floor((1.0 - gamma) * n + kRangeEps)));
  const auto row = kernel.row(n);
  CompensatedSum s;
  for (int k = lo; k <= hi; ++k) s += row->pmf[k - 1];
  return s.value();
}

double corollary_power_bound(double c, double alpha, int n) {
  check_upper_params({c, alpha, 1, 0});
  if (n < 2) throw std::invalid_argument("corollary bound requires n >= 2");
  if (alpha < 1.0) return kE * c / (1.0 - alpha) * std::pow(static_cast<double>(n), 1.0 - alpha);
  return (kE * c - 1.0) * std::log(static_cast<double>(n));
}

double log_theta_prime(double c, double alpha, double x) {
  if (alpha < 1.0) {
    return std::log(c) + 1.0 + kE * c * std::pow(x, 1.0 - alpha) / (1.0 - alpha) -
           alpha * std::log(x);
  }
  return std::log(kE * c) + (kE * c - 1.0) * std::log(x);
}

double log_theta(double c, double alpha, double x) {
  if (alpha < 1.0) return kE * c * std::pow(x, 1.0 - alpha) / (1.0 - alpha);
  return kE * c * std::log(x);
}

std::vector<double> condition_grid(double x_max, int N) {
  x_max = std::max({x_max, static_cast<double>(N), 2.0});
  std::vector<double> grid;
  const double dense_end = std::min(x_max, 2000.0);
  for (double x = 1.0; x <= dense_end; x += 1.0) grid.push_back(x);
  if (x_max > dense_end) {
    constexpr int kGeometricPoints = 200;
    const double ratio = std::pow(x_max / dense_end, 1.0 / kGeometricPoints);
    double x = dense_end;
    for (int k = 1; k <= kGeometricPoints; ++k) {
      x = k == kGeometricPoints ? x_max : x * ratio;
      grid.push_back(x);
    }
  }
  return grid;
}

TheoremConditions check_theorem1_conditions(const UpperBoundedParams& params, double x_max) {
  check_upper_params(params);
  TheoremConditions cond;
  const auto grid = condition_grid(x_max, params.N);
  double prev = log_theta_prime(params.c, params.alpha, grid.front());
  for (double x : grid) {
    const double ltp = log_theta_prime(params.c, params.alpha, x);
    if (ltp < prev - kConditionTol * std::max(1.0, std::abs(prev))) cond.increasing = false;
    prev = ltp;
    if (x >= params.N) {
      const double lhs = 1.0 + std::log(params.psi(x)) + log_theta(params.c, params.alpha, x);
      if (lhs > ltp + kConditionTol * std::max(1.0, std::abs(ltp))) cond.dominates = false;
    }
  }
  cond.at_one = log_theta_prime(params.c, params.alpha, 1.0) >= -kConditionTol;
  return cond;
}

Theorem1Certificate theorem1_certificate(const UpperBoundedParams& params, int n) {
  check_upper_params(params);
  if (n < 1) throw std::invalid_argument("certificate requires n >= 1");
  Theorem1Certificate cert;
  cert.log_theta_prime = log_theta_prime(params.c, params.alpha, n);
  cert.log_moment_bound = params.N + cert.log_theta_prime;
  cert.height_bound = cert.log_theta_prime + params.N;
  cert.conditions = check_theorem1_conditions(params, n);
  return cert;
}

double kappa(double phi, double gamma) {
  if (!(phi > 0.0 && phi <= 1.0)) throw std::invalid_argument("kappa requires phi in (0, 1]");
  check_gamma(gamma);
  return std::log(2.0 * (1.0 + phi) / phi) / -std::log1p(-gamma);
}

Theorem2Certificate theorem2_certificate(const WeaklyBalancedParams& params, int n) {
  check_gamma(params.gamma);
  if (params.N < 1) throw std::invalid_argument("N must be >= 1");
  if (n < 1) throw std::invalid_argument("certificate requires n >= 1");
  Theorem2Certificate cert;
  cert.phi = params.phi(n);
  cert.beta = 1.0 + cert.phi;
  cert.kappa = kappa(cert.phi, params.gamma);
  const double log_n = std::log(static_cast<double>(n));
  cert.log_moment_bound = params.N * std::numbers::ln2 + cert.kappa * log_n;
  cert.height_bound = (cert.kappa * std::log2(static_cast<double>(n)) + params.N) /
                      std::log2(cert.beta);
  return cert;
}

int scan_balance_threshold(const SplitKernel& kernel, const PhiFunction& phi, double gamma,
                           int scan_max) {
  check_gamma(gamma);
  int N = scan_max + 1;
  for (int m = scan_max; m >= 2; --m) {
    if (phi_balance(kernel, m, gamma) < phi(m) - kBoundSlack) break;
    N = m;
  }
  return N;
}

std::string describe(const ClassParams& params) {
  std::ostringstream os;
  os.precision(10);
  if (const auto* up = std::get_if<UpperBoundedParams>(&params)) {
    os << "upper-bounded c=" << up->c << " alpha=" << up->alpha << " N=" << up->N
       << " shift=" << up->shift;
  } else {
    const auto& wb = std::get<WeaklyBalancedParams>(params);
    os << "weakly-balanced phi=" << wb.phi.describe() << " gamma=" << wb.gamma << " N=" << wb.N;
  }
  return os.str();
}

BoundReport verify_certificates(const SplitKernel& kernel, const ClassParams& params,
                                const std::vector<int>& n_grid, const VerifyOptions& options) {
  if (n_grid.empty()) throw std::invalid_argument("verification grid is empty");
  std::vector<int> grid = n_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.front() < 1) throw std::invalid_argument("grid sizes must be >= 1");
  const int n_max = grid.back();

  const auto* up = std::get_if<UpperBoundedParams>(&params);
  const auto* wb = std::get_if<WeaklyBalancedParams>(&params);

  BoundReport report;
  report.kernel = kernel.label();
  report.params = describe(params);
  if (up) {
    check_upper_params(*up);
    report.certificate = "upper-bounded";
    report.log_base = "ln";
    report.N = up->N;
    report.conditions = check_theorem1_conditions(*up, n_max);
  } else {
    check_gamma(wb->gamma);
    if (wb->N < 1) throw std::invalid_argument("N must be >= 1");
    report.certificate = "weakly-balanced";
    report.log_base = "log2";
    report.N = wb->N;
  }

  // Membership on every size in [N, n_max], as a running conjunction.
  const int first = std::max(report.N, 2);
  std::vector<char> holds_through(static_cast<std::size_t>(n_max) + 1, 1);
  std::vector<double> member_value(holds_through.size(), std::nan(""));
  std::vector<double> member_target(holds_through.size(), std::nan(""));
  bool running = true;
  for (int m = 2; m <= n_max; ++m) {
    if (up) {
      member_value[m] = psi_envelope(kernel, m);
      member_target[m] = m - up->shift > 0 ? up->psi(m) : std::nan("");
    } else {
      member_value[m] = phi_balance(kernel, m, wb->gamma);
      member_target[m] = wb->phi(m);
    }
    if (m >= first) {
      const bool ok = up ? member_value[m] <= member_target[m] + kBoundSlack
                         : member_value[m] >= member_target[m] - kBoundSlack;
      running = running && ok;
    }
    holds_through[m] = running;
  }

  const HeightTable table = build_height_table(kernel, n_max, {0.0, 1.0, options.max_cells});

  for (int n : grid) {
    BoundRow row;
    row.n = n;
    row.exact_eh = table.expected_height(n);
    if (n >= 2) {
      row.membership_value = member_value[n];
      row.membership_target = member_target[n];
    } else {
      row.membership_value = row.membership_target = std::nan("");
    }
    row.membership_ok = holds_through[n] != 0;
    if (up) {
      row.beta = std::numbers::e;
      const double ltp = log_theta_prime(up->c, up->alpha, n);
      row.moment_bound_log = up->N + ltp;
      row.height_bound = ltp + up->N;
    } else {
      const Theorem2Certificate cert = theorem2_certificate(*wb, n);
      row.beta = cert.beta;
      row.moment_bound_log = cert.log_moment_bound;
      row.height_bound = cert.height_bound;
    }
    row.moment_log = table.exp_moment(n, row.beta).log_value;
    row.moment_ok = row.moment_log <= row.moment_bound_log + kBoundSlack;
    row.height_ok = row.exact_eh <= row.height_bound + kBoundSlack;
    row.pass = row.membership_ok && row.moment_ok && row.height_ok;
    if (options.mc_replicates >= 2) {
      row.mc = mc_expected_height(kernel, n, options.mc_replicates,
                                  derive_seed(options.seed, static_cast<std::uint64_t>(n)),
                                  options.strategy);
    }
    if (!row.pass) report.pass = false;
    if (row.membership_ok && !(row.moment_ok && row.height_ok)) report.soundness_violation = true;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<std::string> preset_names() { return {"bst-upper", "bst-wbal", "bin-wbal", "uni-wbal"}; }

Preset make_preset(const std::string& name, int scan_max) {
  if (scan_max < 2) throw std::invalid_argument("preset scan range must reach n >= 2");
  if (name == "bst-upper") {
    return {name, SplitKernel::bst(), UpperBoundedParams{2.0, 1.0, 2, 1}, false};
  }
  if (name == "bst-wbal") {
    return {name, SplitKernel::bst(),
            WeaklyBalancedParams{PhiFunction::constant(0.5), 0.25, 2}, false};
  }
  if (name == "bin-wbal" || name.starts_with("bin-wbal:")) {
    double p = 0.5;
    if (name.size() > 9) {
      std::size_t used = 0;
      try {
        p = std::stod(name.substr(9), &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != name.size() - 9) throw std::invalid_argument("bad p in preset " + name);
    }
    const SplitKernel kernel = SplitKernel::binomial(p);
    constexpr double kEpsilon = 0.1;
    WeaklyBalancedParams params{PhiFunction::constant(1.0 - kEpsilon),
                                0.9 * std::min(p, 1.0 - p), 2};
    params.N = scan_balance_threshold(kernel, params.phi, params.gamma, scan_max);
    return {name, kernel, params, true};
  }
  if (name == "uni-wbal") {
    constexpr double kGamma = 0.25;
    constexpr double kDelta = 1.05;
    const double a = (1.0 - 2.0 * kGamma) / (kDelta * std::sqrt(std::numbers::pi * kGamma));
    const SplitKernel kernel = SplitKernel::uniform();
    WeaklyBalancedParams params{PhiFunction::inverse_sqrt(a), kGamma, 2};
    params.N = scan_balance_threshold(kernel, params.phi, params.gamma, scan_max);
    return {name, kernel, params, true};
  }
  throw std::invalid_argument("unknown preset \"" + name + "\"");
}

}  // namespace leaftree

#include "leaftree/split_kernel.hpp"

#include "leaftree/numeric.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <mutex>
#include <sstream>

namespace leaftree {

namespace {

constexpr double kTableRowTolerance = 1e-9;

bool valid_probability_parameter(double p) { return std::isfinite(p) && p > 0.0 && p < 1.0; }

void check_spec(const KernelSpec& spec) {
  switch (spec.kind) {
    case KernelKind::bst:
    case KernelKind::uniform:
      return;
    case KernelKind::binomial:
      if (!valid_probability_parameter(spec.p)) {
        throw KernelSpecError("binomial kernel requires 0 < p < 1");
      }
      return;
    case KernelKind::table:
      break;
  }
  if (spec.fallback == KernelKind::table) {
    throw KernelSpecError("table fallback must be bst, uniform or binomial");
  }
  if (spec.fallback == KernelKind::binomial && !valid_probability_parameter(spec.fallback_p)) {
    throw KernelSpecError("binomial fallback requires 0 < fallback_p < 1");
  }
  for (const auto& [n, values] : spec.rows) {
    if (n < 2) throw KernelSpecError("table row for n = " + std::to_string(n) + ": n must be >= 2");
    if (values.size() != static_cast<std::size_t>(n - 1)) {
      throw KernelSpecError("table row for n = " + std::to_string(n) + " must have " +
                            std::to_string(n - 1) + " entries");
    }
    for (double v : values) {
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw KernelSpecError("table row for n = " + std::to_string(n) +
                              " has an entry outside [0, 1]");
      }
    }
  }
}

// log C_0 .. log C_m, accumulated from C_k / C_{k-1} = 2(2k - 1) / (k + 1).
std::vector<double> log_catalan_table(int m) {
  std::vector<double> out(static_cast<std::size_t>(m) + 1, 0.0);
  CompensatedSum acc;
  for (int k = 1; k <= m; ++k) {
    acc += std::log(2.0 * (2.0 * k - 1.0) / (k + 1.0));
    out[k] = acc.value();
  }
  return out;
}

std::vector<double> uniform_row(int n, const KernelOptions& options) {
  std::vector<double> pmf(static_cast<std::size_t>(n - 1));
  if (n <= options.uniform_exact_max_n) {
    std::vector<BigInt> c(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) c[m] = catalan(m);
    for (int i = 1; i < n; ++i) {
      const Rational r(c[i - 1] * c[n - i - 1], c[n - 1]);
      pmf[i - 1] = r.convert_to<double>();
    }
    return pmf;
  }
  const std::vector<double> logc = log_catalan_table(n - 1);
  for (int i = 1; i < n; ++i) {
    pmf[i - 1] = std::exp(logc[i - 1] + logc[n - i - 1] - logc[n - 1]);
  }
  return pmf;
}

// Anchored at the mode, then ratio steps outward; relative error stays O(n eps).
std::vector<double> binomial_row(int n, double p) {
  const int m = n - 2;
  const boost::math::binomial_distribution<double> dist(m, p);
  std::vector<double> pmf(static_cast<std::size_t>(m + 1));
  const int mode = std::clamp(static_cast<int>(std::floor((m + 1) * p)), 0, m);
  const double odds = p / (1.0 - p);
  pmf[mode] = boost::math::pdf(dist, mode);
  for (int k = mode; k < m; ++k) pmf[k + 1] = pmf[k] * (static_cast<double>(m - k) / (k + 1)) * odds;
  for (int k = mode; k > 0; --k) pmf[k - 1] = pmf[k] * (static_cast<double>(k) / (m - k + 1)) / odds;
  return pmf;
}

Rational exact_rational(double x) {
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);
  // 53-bit integer mantissa times a power of two.
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  BigInt num = scaled;
  BigInt den = 1;
  if (exponent >= 0) {
    num <<= exponent;
  } else {
    den <<= -exponent;
  }
  return Rational(num, den);
}

Rational rational_pow(const Rational& base, int e) {
  Rational r = 1;
  for (int k = 0; k < e; ++k) r *= base;
  return r;
}

BigInt binomial_coefficient(int n, int k) {
  BigInt c = 1;
  for (int t = 1; t <= k; ++t) c = c * (n - k + t) / t;
  return c;
}

}  // namespace

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::bst: return "bst";
    case KernelKind::uniform: return "uniform";
    case KernelKind::binomial: return "binomial";
    case KernelKind::table: return "table";
  }
  return "?";
}

std::optional<KernelKind> parse_kernel_kind(std::string_view name) {
  for (KernelKind k : {KernelKind::bst, KernelKind::uniform, KernelKind::binomial, KernelKind::table}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

struct SplitKernel::State {
  KernelSpec spec;
  KernelOptions options;
  std::vector<std::shared_ptr<const SplitRow>> cache;
  std::unique_ptr<std::once_flag[]> filled;

  State(KernelSpec s, KernelOptions o)
      : spec(std::move(s)),
        options(o),
        cache(static_cast<std::size_t>(std::max(o.cache_max_n, 1)) + 1),
        filled(new std::once_flag[cache.size()]) {}

  std::shared_ptr<const SplitRow> compute_row(int n) const {
    auto row = std::make_shared<SplitRow>();
    row->n = n;
    KernelKind kind = spec.kind;
    double p = spec.p;
    if (kind == KernelKind::table) {
      if (auto it = spec.rows.find(n); it != spec.rows.end()) {
        row->pmf = it->second;
      } else {
        kind = spec.fallback;
        p = spec.fallback_p;
      }
    }
    switch (kind) {
      case KernelKind::bst:
        row->pmf.assign(static_cast<std::size_t>(n - 1), 1.0 / (n - 1));
        break;
      case KernelKind::uniform:
        row->pmf = uniform_row(n, options);
        break;
      case KernelKind::binomial:
        row->pmf = binomial_row(n, p);
        break;
      case KernelKind::table:
        break;
    }
    row->cdf.resize(row->pmf.size());
    CompensatedSum acc;
    row->min_value = row->pmf.empty() ? 0.0 : row->pmf.front();
    for (std::size_t k = 0; k < row->pmf.size(); ++k) {
      acc += row->pmf[k];
      row->cdf[k] = acc.value();
      row->min_value = std::min(row->min_value, row->pmf[k]);
    }
    row->total = acc.value();
    return row;
  }
};

SplitKernel::SplitKernel(KernelSpec spec, KernelOptions options) {
  check_spec(spec);
  if (options.uniform_exact_max_n < 2 || options.cache_max_n < 2) {
    throw std::invalid_argument("kernel options: bounds must be >= 2");
  }
  if (spec.kind != KernelKind::table) {
    spec.rows.clear();
    spec.fallback = KernelKind::bst;
    spec.fallback_p = 0.5;
  }
  if (spec.kind != KernelKind::binomial) spec.p = 0.5;
  if (spec.kind == KernelKind::table && spec.fallback != KernelKind::binomial) spec.fallback_p = 0.5;
  state_ = std::make_shared<State>(std::move(spec), options);
}

namespace {

KernelSpec spec_of(KernelKind kind, double p = 0.5) {
  KernelSpec spec;
  spec.kind = kind;
  spec.p = p;
  return spec;
}

}  // namespace

SplitKernel SplitKernel::bst() { return SplitKernel(spec_of(KernelKind::bst)); }

SplitKernel SplitKernel::uniform(KernelOptions options) {
  return SplitKernel(spec_of(KernelKind::uniform), options);
}

SplitKernel SplitKernel::binomial(double p) { return SplitKernel(spec_of(KernelKind::binomial, p)); }

SplitKernel SplitKernel::table(std::map<int, std::vector<double>> rows, KernelKind fallback,
                               double fallback_p) {
  KernelSpec spec = spec_of(KernelKind::table);
  spec.rows = std::move(rows);
  spec.fallback = fallback;
  spec.fallback_p = fallback_p;
  return SplitKernel(std::move(spec));
}

const KernelSpec& SplitKernel::spec() const { return state_->spec; }
const KernelOptions& SplitKernel::options() const { return state_->options; }

KernelKind SplitKernel::effective_kind(int n) const {
  const auto& s = spec();
  if (s.kind == KernelKind::table && !s.rows.contains(n)) return s.fallback;
  return s.kind;
}

double SplitKernel::effective_p(int n) const {
  const auto& s = spec();
  if (s.kind == KernelKind::table) return s.rows.contains(n) ? 0.5 : s.fallback_p;
  return s.p;
}

std::shared_ptr<const SplitRow> SplitKernel::row(int n) const {
  if (n < 2) throw std::invalid_argument("split row requires n >= 2, got " + std::to_string(n));
  if (n > state_->options.cache_max_n) return state_->compute_row(n);
  std::call_once(state_->filled[n], [&] { state_->cache[n] = state_->compute_row(n); });
  return state_->cache[n];
}

double SplitKernel::sigma(int i, int j) const {
  if (i < 1 || j < 1) {
    throw std::invalid_argument("sigma(i, j) is defined for i, j >= 1 only");
  }
  const int n = i + j;
  if (n > state_->options.cache_max_n && effective_kind(n) == KernelKind::bst) {
    return 1.0 / (n - 1);
  }
  return row(n)->pmf[i - 1];
}

double SplitKernel::default_tolerance() const {
  const KernelKind k = spec().kind;
  return (k == KernelKind::bst || k == KernelKind::uniform) ? 1e-12 : 1e-9;
}

std::string SplitKernel::label() const {
  const auto& s = spec();
  std::ostringstream os;
  switch (s.kind) {
    case KernelKind::binomial:
      os << "binomial(" << s.p << ")";
      break;
    case KernelKind::table:
      os << "table(" << s.rows.size() << " rows, fallback=" << to_string(s.fallback);
      if (s.fallback == KernelKind::binomial) os << "(" << s.fallback_p << ")";
      os << ")";
      break;
    default:
      os << to_string(s.kind);
  }
  return os.str();
}

std::vector<double> split_pmf(const SplitKernel& kernel, int n) {
  if (n < 2) throw std::invalid_argument("split_pmf requires n >= 2");
  return kernel.row(n)->pmf;
}

ValidationReport validate_kernel(const SplitKernel& kernel, int n_max, double tol) {
  if (n_max < 2) throw std::invalid_argument("validate_kernel requires n_max >= 2");
  if (!(tol > 0.0)) throw std::invalid_argument("validate_kernel requires tol > 0");
  ValidationReport report;
  report.tolerance = tol;
  report.rows.reserve(static_cast<std::size_t>(n_max - 1));
  for (int n = 2; n <= n_max; ++n) {
    const auto row = kernel.row(n);
    RowCheck check{n, std::abs(row->total - 1.0), row->min_value, true};
    check.ok = check.deviation <= tol && check.min_value >= 0.0;
    if (!check.ok) {
      report.pass = false;
      if (!report.first_failure) report.first_failure = n;
    }
    report.rows.push_back(check);
  }
  return report;
}

TreeProbability tree_probability(const SplitKernel& kernel, const BinaryTree& t) {
  const auto sizes = t.sizes();
  CompensatedSum log_p;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 1) continue;
    const int left = static_cast<int>(sizes[i + 1]);
    const double s = kernel.sigma(left, static_cast<int>(sizes[i]) - left);
    if (s <= 0.0) return {0.0, kNegInf};
    log_p += std::log(s);
  }
  const double lp = log_p.value();
  return {std::exp(lp), lp};
}

Rational exact_sigma(const SplitKernel& kernel, int i, int j) {
  if (i < 1 || j < 1) throw std::invalid_argument("sigma(i, j) is defined for i, j >= 1 only");
  const int n = i + j;
  const auto& s = kernel.spec();
  switch (kernel.effective_kind(n)) {
    case KernelKind::bst:
      return Rational(1, n - 1);
    case KernelKind::uniform:
      return Rational(catalan(i - 1) * catalan(j - 1), catalan(n - 1));
    case KernelKind::binomial: {
      const Rational p = exact_rational(kernel.effective_p(n));
      return rational_pow(p, i - 1) * rational_pow(Rational(1) - p, j - 1) *
             Rational(binomial_coefficient(n - 2, i - 1));
    }
    case KernelKind::table:
      return exact_rational(s.rows.at(n)[i - 1]);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// KernelSpec JSON

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw KernelSpecError("unexpected field \"" + key + "\" in kernel spec");
    }
  }
}

double read_probability(const json& j, const char* field) {
  if (!j.contains(field)) throw KernelSpecError(std::string("missing field \"") + field + "\"");
  const json& v = j.at(field);
  if (!v.is_number()) throw KernelSpecError(std::string("field \"") + field + "\" must be a number");
  const double p = v.get<double>();
  if (!valid_probability_parameter(p)) {
    throw KernelSpecError(std::string("field \"") + field + "\" must lie in (0, 1)");
  }
  return p;
}

KernelKind read_kind(const json& j, const char* field, bool allow_table) {
  if (!j.contains(field) || !j.at(field).is_string()) {
    throw KernelSpecError(std::string("field \"") + field + "\" must be a string");
  }
  const auto name = j.at(field).get<std::string>();
  const auto kind = parse_kernel_kind(name);
  if (!kind || (!allow_table && *kind == KernelKind::table)) {
    throw KernelSpecError("unknown kernel kind \"" + name + "\"");
  }
  return *kind;
}

}  // namespace

KernelSpec parse_kernel_spec(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw KernelSpecError(std::string("malformed kernel spec: ") + e.what());
  }
  if (!j.is_object()) throw KernelSpecError("kernel spec must be a JSON object");

  KernelSpec spec;
  spec.kind = read_kind(j, "kind", true);
  switch (spec.kind) {
    case KernelKind::bst:
    case KernelKind::uniform:
      reject_unknown_keys(j, {"kind"});
      break;
    case KernelKind::binomial:
      reject_unknown_keys(j, {"kind", "p"});
      spec.p = read_probability(j, "p");
      break;
    case KernelKind::table: {
      reject_unknown_keys(j, {"kind", "rows", "fallback", "fallback_p"});
      spec.fallback = read_kind(j, "fallback", false);
      if (spec.fallback == KernelKind::binomial) {
        if (j.contains("fallback_p")) spec.fallback_p = read_probability(j, "fallback_p");
      } else if (j.contains("fallback_p")) {
        throw KernelSpecError("\"fallback_p\" is only allowed with a binomial fallback");
      }
      if (!j.contains("rows") || !j.at("rows").is_object()) {
        throw KernelSpecError("table kernel requires a \"rows\" object");
      }
      for (const auto& [key, values] : j.at("rows").items()) {
        int n = 0;
        const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), n);
        if (ec != std::errc() || ptr != key.data() + key.size() || n < 2) {
          throw KernelSpecError("table row key \"" + key + "\" is not a size n >= 2");
        }
        if (!values.is_array()) {
          throw KernelSpecError("table row for n = " + key + " must be an array");
        }
        std::vector<double> row;
        for (const auto& v : values) {
          if (!v.is_number()) {
            throw KernelSpecError("table row for n = " + key + " has a non-numeric entry");
          }
          row.push_back(v.get<double>());
        }
        spec.rows[n] = std::move(row);
      }
      break;
    }
  }
  check_spec(spec);
  for (const auto& [n, values] : spec.rows) {
    CompensatedSum total;
    for (double v : values) total += v;
    if (std::abs(total.value() - 1.0) > kTableRowTolerance) {
      std::ostringstream os;
      os.precision(15);
      os << "table row for n = " << n << " sums to " << total.value() << ", not 1";
      throw KernelRowError(n, os.str());
    }
  }
  return spec;
}

std::string render_kernel_spec(const KernelSpec& spec) {
  json j;
  j["kind"] = std::string(to_string(spec.kind));
  if (spec.kind == KernelKind::binomial) j["p"] = spec.p;
  if (spec.kind == KernelKind::table) {
    j["fallback"] = std::string(to_string(spec.fallback));
    if (spec.fallback == KernelKind::binomial) j["fallback_p"] = spec.fallback_p;
    json rows = json::object();
    for (const auto& [n, values] : spec.rows) rows[std::to_string(n)] = values;
    j["rows"] = std::move(rows);
  }
  return j.dump();
}

SplitKernel load_kernel_spec(std::string_view text) { return SplitKernel(parse_kernel_spec(text)); }

std::string render_kernel_spec(const SplitKernel& kernel) { return render_kernel_spec(kernel.spec()); }

}  // namespace leaftree

#include "cli.hpp"

#include "leaftree/bounds.hpp"
#include "leaftree/height_dp.hpp"
#include "leaftree/report_io.hpp"
#include "leaftree/sampler.hpp"
#include "leaftree/split_kernel.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

namespace leaftree::cli {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

// Thrown for bad user input that CLI11 cannot catch on its own.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Args {
  // kernel selection
  std::string kernel;
  std::string kernel_file;
  std::string kernel_json;
  std::string preset;
  // sizes
  int n = 0;
  std::string grid;
  int n_max = 1000;
  // numerics
  double tail_tol = 1e-12;
  double tol = 0.0;
  std::size_t max_cells = DpOptions{}.max_cells;
  double beta = 0.0;
  bool cdf = false;
  // sampling
  std::uint64_t seed = 0;
  int replicates = 10000;
  int count = 1;
  std::string strategy = "cdf-row";
  std::string emit = "heights";
  bool remy = false;
  // certificate parameters
  std::string cls;
  double c = 2.0;
  double alpha = 1.0;
  int N = 2;
  int shift = 0;
  std::string phi = "const:0.5";
  double gamma = 0.25;
  // output
  std::string output;
  std::string format = "csv";
};

int parse_int(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("not an integer: \"" + s + "\"");
  }
  return v;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw InputError("not a number: \"" + s + "\"");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SplitKernel kernel_from_name(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const auto kind = parse_kernel_kind(name);
  if (!kind || *kind == KernelKind::table) {
    throw InputError("unknown kernel \"" + name + "\" (bst, uniform, binomial:P)");
  }
  if (*kind == KernelKind::binomial) {
    if (colon == std::string::npos) throw InputError("binomial kernel needs a parameter, e.g. binomial:0.5");
    return SplitKernel::binomial(parse_double(text.substr(colon + 1)));
  }
  if (colon != std::string::npos) throw InputError("kernel \"" + name + "\" takes no parameter");
  return *kind == KernelKind::bst ? SplitKernel::bst() : SplitKernel::uniform();
}

std::optional<SplitKernel> resolve_kernel(const Args& a) {
  const int given = !a.kernel.empty() + !a.kernel_file.empty() + !a.kernel_json.empty();
  if (given > 1) throw InputError("use only one of --kernel, --kernel-file, --kernel-json");
  if (!a.kernel.empty()) return kernel_from_name(a.kernel);
  if (!a.kernel_file.empty()) return load_kernel_spec(read_file(a.kernel_file));
  if (!a.kernel_json.empty()) return load_kernel_spec(a.kernel_json);
  return std::nullopt;
}

SplitKernel require_kernel(const Args& a) {
  auto k = resolve_kernel(a);
  if (!k) throw InputError("a kernel is required (--kernel, --kernel-file or --kernel-json)");
  return *k;
}

std::vector<int> resolve_sizes(const Args& a) {
  if (a.n != 0 && !a.grid.empty()) throw InputError("use either --n or --grid");
  if (a.n != 0) {
    if (a.n < 1) throw InputError("--n must be >= 1");
    return {a.n};
  }
  if (a.grid.empty()) throw InputError("--n or --grid is required");
  return parse_grid(a.grid);
}

SplitStrategy resolve_strategy(const Args& a) {
  if (a.strategy == "cdf-row") return SplitStrategy::cdf_row;
  if (a.strategy == "specialized") return SplitStrategy::specialized;
  throw InputError("unknown strategy \"" + a.strategy + "\" (cdf-row, specialized)");
}

PhiFunction parse_phi(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InputError("phi must look like const:X, inv-sqrt:A or table:X,Y,...");
  const std::string form = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  if (form == "const") return PhiFunction::constant(parse_double(rest));
  if (form == "inv-sqrt") return PhiFunction::inverse_sqrt(parse_double(rest));
  if (form == "table") {
    std::vector<double> v;
    for (const auto& part : split(rest, ',')) v.push_back(parse_double(part));
    if (v.empty()) throw InputError("phi table is empty");
    return PhiFunction::table(std::move(v));
  }
  throw InputError("unknown phi form \"" + form + "\"");
}

ClassParams params_from_args(const Args& a) {
  if (a.cls == "upper") return UpperBoundedParams{a.c, a.alpha, a.N, a.shift};
  if (a.cls == "wbal") return WeaklyBalancedParams{parse_phi(a.phi), a.gamma, a.N};
  throw InputError("--class must be upper or wbal");
}

struct Resolved {
  std::optional<SplitKernel> kernel;
  ClassParams params;
  bool N_empirical = false;
};

Resolved resolve_certificate(const Args& a, int scan_max, bool need_kernel) {
  if (!a.preset.empty()) {
    if (!a.cls.empty() || resolve_kernel(a)) {
      throw InputError("--preset cannot be combined with --class or a kernel");
    }
    Preset p = make_preset(a.preset, scan_max);
    return {p.kernel, p.params, p.N_empirical};
  }
  if (a.cls.empty()) throw InputError("either --preset or --class is required");
  Resolved r{resolve_kernel(a), params_from_args(a), false};
  if (need_kernel && !r.kernel) throw InputError("a kernel is required with --class");
  return r;
}

json manifest(const std::string& subcommand, const Args& a, const std::optional<SplitKernel>& kernel,
              const std::optional<ClassParams>& params) {
  json m = {{"tool", "leaftree"}, {"version", kVersion}, {"subcommand", subcommand}};
  if (kernel) m["kernel"] = json::parse(render_kernel_spec(*kernel));
  if (!a.preset.empty()) m["preset"] = a.preset;
  if (params) m["class_params"] = describe(*params);
  if (a.n != 0) m["n"] = a.n;
  if (!a.grid.empty()) m["grid"] = a.grid;
  m["seed"] = a.seed;
  m["tail_tol"] = a.tail_tol;
  m["max_cells"] = a.max_cells;
  m["strategy"] = a.strategy;
  m["format"] = a.format;
  if (!a.output.empty()) m["output"] = a.output;
  if (subcommand == "validate") {
    m["n_max"] = a.n_max;
    m["tol"] = a.tol;
  }
  if (subcommand == "mc" || subcommand == "report" || subcommand == "verify") {
    m["replicates"] = a.replicates;
  }
  if (subcommand == "sample") {
    m["count"] = a.count;
    m["emit"] = a.emit;
    m["remy"] = a.remy;
  }
  if (subcommand == "exact" && a.beta > 0.0) m["beta"] = a.beta;
  return m;
}

// Writes the result to --output (plus a manifest sidecar) or to `out`.
void emit(const Args& a, std::ostream& out, const std::string& body, const json& run_manifest) {
  if (a.output.empty()) {
    out << body;
    return;
  }
  std::ofstream file(a.output, std::ios::binary);
  if (!file) throw InputError("cannot write " + a.output);
  file << body;
  std::ofstream side(a.output + ".manifest.json", std::ios::binary);
  if (!side) throw InputError("cannot write " + a.output + ".manifest.json");
  side << run_manifest.dump(2) << '\n';
}

void check_format(const Args& a) {
  if (a.format != "csv" && a.format != "json") throw InputError("--format must be csv or json");
}

// ---------------------------------------------------------------------------

int cmd_validate(const Args& a, std::ostream& out, std::ostream& err) {
  check_format(a);
  const SplitKernel kernel = require_kernel(a);
  const double tol = a.tol > 0.0 ? a.tol : kernel.default_tolerance();
  const ValidationReport report = validate_kernel(kernel, a.n_max, tol);
  const json m = manifest("validate", a, kernel, std::nullopt);
  std::ostringstream body;
  if (a.format == "json") {
    json rows = json::array();
    for (const auto& r : report.rows) {
      rows.push_back({{"n", r.n}, {"deviation", r.deviation}, {"min_value", r.min_value}, {"ok", r.ok}});
    }
    json j = {{"manifest", m}, {"kernel", kernel.label()}, {"tolerance", tol},
              {"pass", report.pass}, {"rows", rows}};
    if (report.first_failure) j["first_failure"] = *report.first_failure;
    body << j.dump(2) << '\n';
  } else {
    body << "n,deviation,min_value,ok\n";
    for (const auto& r : report.rows) {
      body << r.n << ',' << format_double(r.deviation) << ',' << format_double(r.min_value) << ','
           << (r.ok ? "true" : "false") << '\n';
    }
  }
  emit(a, out, body.str(), m);
  if (!report.pass) {
    err << "leaftree: kernel " << kernel.label() << " fails normalization at n = "
        << *report.first_failure << " (tol " << format_double(tol) << ")\n";
    return kExitVerificationFailed;
  }
  return kExitOk;
}

int cmd_sample(const Args& a, std::ostream& out, std::ostream&) {
  check_format(a);
  if (a.n < 1) throw InputError("--n must be >= 1");
  if (a.count < 1) throw InputError("--count must be >= 1");
  if (a.emit != "heights" && a.emit != "trees") throw InputError("--emit must be heights or trees");
  const SplitStrategy strategy = resolve_strategy(a);
  std::optional<SplitKernel> kernel;
  if (a.remy) {
    if (resolve_kernel(a)) throw InputError("--remy samples uniform trees and takes no kernel");
  } else {
    kernel = require_kernel(a);
  }
  const bool trees = a.emit == "trees";
  const json m = manifest("sample", a, kernel, std::nullopt);
  std::ostringstream body;
  json rows = json::array();
  if (a.format == "csv") body << (trees ? "replicate,height,tree\n" : "replicate,height\n");
  for (int r = 0; r < a.count; ++r) {
    Rng rng = make_rng(derive_seed(a.seed, static_cast<std::uint64_t>(r)));
    if (!trees && kernel) {
      const int h = sample_height(*kernel, a.n, rng, strategy);
      if (a.format == "csv") {
        body << r << ',' << h << '\n';
      } else {
        rows.push_back({{"replicate", r}, {"height", h}});
      }
      continue;
    }
    const BinaryTree t = kernel ? sample_tree(*kernel, a.n, rng, strategy) : sample_uniform_remy(a.n, rng);
    const int h = height(t);
    if (a.format == "csv") {
      body << r << ',' << h;
      if (trees) body << ',' << t.shape_code();
      body << '\n';
    } else {
      json row = {{"replicate", r}, {"height", h}};
      if (trees) row["tree"] = t.shape_code();
      rows.push_back(std::move(row));
    }
  }
  if (a.format == "json") body << json{{"manifest", m}, {"samples", rows}}.dump(2) << '\n';
  emit(a, out, body.str(), m);
  return kExitOk;
}

int cmd_exact(const Args& a, std::ostream& out, std::ostream&) {
  check_format(a);
  const SplitKernel kernel = require_kernel(a);
  const std::vector<int> sizes = resolve_sizes(a);
  if (a.beta != 0.0 && !(a.beta > 1.0)) throw InputError("--beta must be > 1");
  const json m = manifest("exact", a, kernel, std::nullopt);
  std::ostringstream body;

  if (a.cdf) {
    if (sizes.size() != 1) throw InputError("--cdf needs a single --n");
    const HeightCdf cdf = height_cdf(kernel, sizes.front(), a.tail_tol, a.max_cells);
    if (a.format == "json") {
      body << json{{"manifest", m}, {"n", cdf.n}, {"cdf", cdf.values}, {"tail_mass", cdf.tail_mass},
                   {"tail_tol", cdf.tail_tol}}.dump(2)
           << '\n';
    } else {
      body << "h,cdf\n";
      for (int h = 0; h <= cdf.h_cut(); ++h) body << h << ',' << format_double(cdf.values[h]) << '\n';
    }
    emit(a, out, body.str(), m);
    return kExitOk;
  }

  if (a.n != 0 && a.beta == 0.0 && a.format == "csv") {
    const HeightEstimate e = expected_height(kernel, a.n, a.tail_tol, a.max_cells);
    body << format_double(e.value, 16) << '\n';
    emit(a, out, body.str(), m);
    return kExitOk;
  }

  const int n_max = sizes.back();
  DpOptions opts{a.tail_tol, 1.0, a.max_cells};
  if (a.beta > 1.0) {
    // The moment needs the weighted tail rule at every reported size.
    opts.tail_tol = 0.0;
  }
  const HeightTable table = build_height_table(kernel, n_max, opts);
  json rows = json::array();
  if (a.format == "csv") {
    body << "n,expected_height,error_bound,h_cut";
    if (a.beta > 1.0) body << ",log_moment";
    body << '\n';
  }
  for (int n : sizes) {
    const int cut = table.cut(n);
    const double value = table.expected_height(n);
    const double bound = table.tail(n, cut) * (n - 1 - cut);
    if (a.format == "csv") {
      body << n << ',' << format_double(value) << ',' << format_double(bound) << ',' << cut;
      if (a.beta > 1.0) body << ',' << format_double(table.exp_moment(n, a.beta).log_value);
      body << '\n';
    } else {
      json row = {{"n", n}, {"expected_height", value}, {"error_bound", bound}, {"h_cut", cut}};
      if (a.beta > 1.0) row["log_moment"] = table.exp_moment(n, a.beta).log_value;
      rows.push_back(std::move(row));
    }
  }
  if (a.format == "json") body << json{{"manifest", m}, {"rows", rows}}.dump(2) << '\n';
  emit(a, out, body.str(), m);
  return kExitOk;
}

int cmd_mc(const Args& a, std::ostream& out, std::ostream&) {
  check_format(a);
  const SplitKernel kernel = require_kernel(a);
  const std::vector<int> sizes = resolve_sizes(a);
  const SplitStrategy strategy = resolve_strategy(a);
  if (a.replicates < 2) throw InputError("--replicates must be >= 2");
  const json m = manifest("mc", a, kernel, std::nullopt);
  std::ostringstream body;
  json rows = json::array();
  if (a.format == "csv") body << "n,mean,stderr,replicates\n";
  for (int n : sizes) {
    const McEstimate e = mc_expected_height(kernel, n, a.replicates, a.seed, strategy);
    if (a.format == "csv") {
      body << n << ',' << format_double(e.mean) << ',' << format_double(e.std_error) << ','
           << e.replicates << '\n';
    } else {
      rows.push_back({{"n", n}, {"mean", e.mean}, {"stderr", e.std_error}, {"replicates", e.replicates}});
    }
  }
  if (a.format == "json") body << json{{"manifest", m}, {"rows", rows}}.dump(2) << '\n';
  emit(a, out, body.str(), m);
  return kExitOk;
}

int cmd_bounds(const Args& a, std::ostream& out, std::ostream& err) {
  check_format(a);
  const std::vector<int> sizes = resolve_sizes(a);
  const Resolved r = resolve_certificate(a, std::max(sizes.back(), 2), false);
  const json m = manifest("bounds", a, r.kernel, r.params);
  std::ostringstream body;
  json rows = json::array();
  std::optional<TheoremConditions> conditions;

  if (const auto* up = std::get_if<UpperBoundedParams>(&r.params)) {
    conditions = check_theorem1_conditions(*up, sizes.back());
    if (a.format == "csv") body << "n,psi,log_theta_prime,moment_bound_log,height_bound,corollary_leading\n";
    for (int n : sizes) {
      const Theorem1Certificate cert = theorem1_certificate(*up, n);
      const double psi = n - up->shift > 0 ? up->psi(n) : std::nan("");
      const double lead = n >= 2 ? corollary_power_bound(up->c, up->alpha, n) : std::nan("");
      if (a.format == "csv") {
        body << n << ',' << format_double(psi) << ',' << format_double(cert.log_theta_prime) << ','
             << format_double(cert.log_moment_bound) << ',' << format_double(cert.height_bound) << ','
             << (n >= 2 ? format_double(lead) : "") << '\n';
      } else {
        rows.push_back({{"n", n},
                        {"psi", std::isfinite(psi) ? json(psi) : json(nullptr)},
                        {"log_theta_prime", cert.log_theta_prime},
                        {"moment_bound_log", cert.log_moment_bound},
                        {"height_bound", cert.height_bound},
                        {"corollary_leading", n >= 2 ? json(lead) : json(nullptr)}});
      }
    }
  } else {
    const auto& wb = std::get<WeaklyBalancedParams>(r.params);
    if (a.format == "csv") body << "n,phi,beta,kappa,moment_bound_log,height_bound\n";
    for (int n : sizes) {
      const Theorem2Certificate cert = theorem2_certificate(wb, n);
      if (a.format == "csv") {
        body << n << ',' << format_double(cert.phi) << ',' << format_double(cert.beta) << ','
             << format_double(cert.kappa) << ',' << format_double(cert.log_moment_bound) << ','
             << format_double(cert.height_bound) << '\n';
      } else {
        rows.push_back({{"n", n}, {"phi", cert.phi}, {"beta", cert.beta}, {"kappa", cert.kappa},
                        {"moment_bound_log", cert.log_moment_bound}, {"height_bound", cert.height_bound}});
      }
    }
  }
  if (a.format == "json") {
    json j = {{"manifest", m}, {"params", describe(r.params)}, {"rows", rows}};
    if (conditions) {
      j["conditions"] = {{"theta_prime_increasing", conditions->increasing},
                         {"domination", conditions->dominates},
                         {"theta_prime_at_one", conditions->at_one}};
    }
    body << j.dump(2) << '\n';
  } else if (conditions) {
    err << "leaftree: theorem conditions: theta' increasing=" << conditions->increasing
        << ", domination=" << conditions->dominates << ", theta'(1)>=1=" << conditions->at_one << '\n';
  }
  emit(a, out, body.str(), m);
  return kExitOk;
}

int cmd_verify(const std::string& name, const Args& a, bool with_mc, std::ostream& out,
               std::ostream& err) {
  check_format(a);
  const std::vector<int> sizes = resolve_sizes(a);
  const Resolved r = resolve_certificate(a, std::max(sizes.back(), 2), true);
  VerifyOptions opts;
  opts.max_cells = a.max_cells;
  opts.seed = a.seed;
  opts.strategy = resolve_strategy(a);
  if (with_mc) {
    if (a.replicates < 2) throw InputError("--replicates must be >= 2");
    opts.mc_replicates = a.replicates;
  }
  BoundReport report = verify_certificates(*r.kernel, r.params, sizes, opts);
  report.N_empirical = r.N_empirical;
  const json m = manifest(name, a, r.kernel, r.params);
  std::ostringstream body;
  if (a.format == "json") {
    json j = bound_report_json(report);
    j["manifest"] = m;
    body << j.dump(2) << '\n';
  } else {
    write_bound_report_csv(report, body);
  }
  emit(a, out, body.str(), m);
  if (report.N_empirical) {
    err << "leaftree: N = " << report.N << " was found by scanning the balance condition up to n = "
        << sizes.back() << " (range-verified, not proven)\n";
  }
  if (report.soundness_violation) {
    err << "leaftree: certificate inequality failed although membership held\n";
  }
  if (!report.pass) {
    err << "leaftree: verification failed for " << report.kernel << " (" << report.params << ")\n";
    return kExitVerificationFailed;
  }
  return kExitOk;
}

void add_kernel_options(CLI::App* sub, Args& a) {
  sub->add_option("--kernel", a.kernel, "bst, uniform or binomial:P");
  sub->add_option("--kernel-file", a.kernel_file, "kernel spec JSON file");
  sub->add_option("--kernel-json", a.kernel_json, "inline kernel spec JSON");
}

void add_output_options(CLI::App* sub, Args& a) {
  sub->add_option("--output,-o", a.output, "write results here (a .manifest.json sidecar is added)");
  sub->add_option("--format", a.format, "csv or json")->capture_default_str();
}

void add_size_options(CLI::App* sub, Args& a) {
  sub->add_option("--n", a.n, "tree size (leaves)");
  sub->add_option("--grid", a.grid, "sizes: a:b[:step] or a,b,c");
}

void add_class_options(CLI::App* sub, Args& a) {
  sub->add_option("--preset", a.preset, "bst-upper, bst-wbal, bin-wbal[:p], uni-wbal");
  sub->add_option("--class", a.cls, "upper or wbal");
  sub->add_option("--c", a.c, "upper: psi(x) = c (x - shift)^-alpha")->capture_default_str();
  sub->add_option("--alpha", a.alpha, "upper: exponent in [0, 1]")->capture_default_str();
  sub->add_option("--shift", a.shift, "upper: 0 or 1")->capture_default_str();
  sub->add_option("--phi", a.phi, "wbal: const:X, inv-sqrt:A or table:X,Y,...")->capture_default_str();
  sub->add_option("--gamma", a.gamma, "wbal: gamma in (0, 1/2)")->capture_default_str();
  sub->add_option("--N", a.N, "class threshold N")->capture_default_str();
}

}  // namespace

std::vector<int> parse_grid(const std::string& text) {
  std::vector<int> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() < 2 || parts.size() > 3) throw InputError("grid must be a:b or a:b:step");
    const int lo = parse_int(parts[0]);
    const int hi = parse_int(parts[1]);
    const int step = parts.size() == 3 ? parse_int(parts[2]) : 1;
    if (step < 1 || lo > hi) throw InputError("grid needs a <= b and step >= 1");
    for (long v = lo; v <= hi; v += step) out.push_back(static_cast<int>(v));
  } else {
    for (const auto& part : split(text, ',')) out.push_back(parse_int(part));
  }
  if (out.empty()) throw InputError("empty grid");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.front() < 1) throw InputError("grid sizes must be >= 1");
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"leaftree: leaf-centric binary tree sources, exact heights and bound certificates"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Args a;

  auto* validate = app.add_subcommand("validate", "check sum_k sigma(k, n-k) = 1 for n <= n_max");
  add_kernel_options(validate, a);
  validate->add_option("--n-max", a.n_max, "largest n to check")->capture_default_str();
  validate->add_option("--tol", a.tol, "tolerance (default: 1e-12 closed-form, 1e-9 otherwise)");
  add_output_options(validate, a);

  auto* sample = app.add_subcommand("sample", "draw trees or heights");
  add_kernel_options(sample, a);
  sample->add_option("--n", a.n, "tree size")->required();
  sample->add_option("--count", a.count, "number of samples")->capture_default_str();
  sample->add_option("--seed", a.seed, "master seed")->capture_default_str();
  sample->add_option("--emit", a.emit, "heights or trees")->capture_default_str();
  sample->add_option("--strategy", a.strategy, "cdf-row or specialized")->capture_default_str();
  sample->add_flag("--remy", a.remy, "uniform trees by leaf insertion instead of a kernel");
  add_output_options(sample, a);

  auto* exact = app.add_subcommand("exact", "exact expected height (or CDF) from the height DP");
  add_kernel_options(exact, a);
  add_size_options(exact, a);
  exact->add_option("--tail-tol", a.tail_tol, "stop once P(H > h) <= tol (0: run to n - 1)")
      ->capture_default_str();
  exact->add_option("--beta", a.beta, "also report log E(beta^H)");
  exact->add_flag("--cdf", a.cdf, "print P(H <= h) for a single n");
  exact->add_option("--max-cells", a.max_cells, "DP memory budget in table cells")->capture_default_str();
  add_output_options(exact, a);

  auto* mc = app.add_subcommand("mc", "Monte Carlo expected height");
  add_kernel_options(mc, a);
  add_size_options(mc, a);
  mc->add_option("--replicates", a.replicates, "replicates per size")->capture_default_str();
  mc->add_option("--seed", a.seed, "master seed")->capture_default_str();
  mc->add_option("--strategy", a.strategy, "cdf-row or specialized")->capture_default_str();
  add_output_options(mc, a);

  auto* bounds = app.add_subcommand("bounds", "evaluate certificate bounds without the DP");
  add_kernel_options(bounds, a);
  add_size_options(bounds, a);
  add_class_options(bounds, a);
  add_output_options(bounds, a);

  auto* verify = app.add_subcommand("verify", "check class membership and certificates against the exact DP");
  auto* report = app.add_subcommand("report", "verify plus Monte Carlo columns");
  for (auto* sub : {verify, report}) {
    add_kernel_options(sub, a);
    add_size_options(sub, a);
    add_class_options(sub, a);
    sub->add_option("--seed", a.seed, "master seed")->capture_default_str();
    sub->add_option("--strategy", a.strategy, "cdf-row or specialized")->capture_default_str();
    sub->add_option("--max-cells", a.max_cells, "DP memory budget in table cells")->capture_default_str();
    add_output_options(sub, a);
  }
  verify->add_option("--replicates", a.replicates, "add Monte Carlo columns with this many replicates");
  report->add_option("--replicates", a.replicates, "replicates per size")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (validate->parsed()) return cmd_validate(a, out, err);
    if (sample->parsed()) return cmd_sample(a, out, err);
    if (exact->parsed()) return cmd_exact(a, out, err);
    if (mc->parsed()) return cmd_mc(a, out, err);
    if (bounds->parsed()) return cmd_bounds(a, out, err);
    if (verify->parsed()) {
      const bool with_mc = verify->count("--replicates") > 0;
      return cmd_verify("verify", a, with_mc, out, err);
    }
    if (report->parsed()) return cmd_verify("report", a, true, out, err);
  } catch (const std::exception& e) {
    err << "leaftree: error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace leaftree::cli

#include "leaftree/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace leaftree {

std::string format_double(double x, int digits) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

namespace {

const char* flag(bool b) { return b ? "true" : "false"; }

// JSON has no infinities; those become null.
nlohmann::json number_or_null(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

nlohmann::json conditions_json(const TheoremConditions& c) {
  return {{"theta_prime_increasing", c.increasing},
          {"domination", c.dominates},
          {"theta_prime_at_one", c.at_one}};
}

}  // namespace

void write_bound_report_csv(const BoundReport& report, std::ostream& os) {
  os << kBoundCsvHeader << '\n';
  for (const BoundRow& r : report.rows) {
    const double moment = std::exp(r.moment_log);
    os << r.n << ',' << format_double(r.exact_eh) << ',';
    if (r.mc) {
      os << format_double(r.mc->mean) << ',' << format_double(r.mc->std_error);
    } else {
      os << ',';
    }
    os << ',' << format_double(moment) << ',' << format_double(r.moment_bound_log) << ','
       << format_double(r.height_bound) << ',' << flag(r.membership_ok) << ',' << flag(r.pass)
       << '\n';
  }
}

nlohmann::json bound_report_json(const BoundReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const BoundRow& r : report.rows) {
    nlohmann::json row = {
        {"n", r.n},
        {"exact_EH", r.exact_eh},
        {"beta", r.beta},
        {"moment", number_or_null(std::exp(r.moment_log))},
        {"moment_log", r.moment_log},
        {"moment_bound_log", r.moment_bound_log},
        {"height_bound", r.height_bound},
        {"membership_value", number_or_null(r.membership_value)},
        {"membership_target", number_or_null(r.membership_target)},
        {"membership_ok", r.membership_ok},
        {"moment_ok", r.moment_ok},
        {"height_ok", r.height_ok},
        {"pass", r.pass},
    };
    if (r.mc) {
      row["mc_EH"] = r.mc->mean;
      row["mc_stderr"] = r.mc->std_error;
      row["mc_replicates"] = r.mc->replicates;
    } else {
      row["mc_EH"] = nullptr;
      row["mc_stderr"] = nullptr;
    }
    rows.push_back(std::move(row));
  }
  nlohmann::json j = {
      {"kernel", report.kernel},
      {"certificate", report.certificate},
      {"log_base", report.log_base},
      {"params", report.params},
      {"N", report.N},
      {"N_empirical", report.N_empirical},
      {"pass", report.pass},
      {"soundness_violation", report.soundness_violation},
      {"rows", std::move(rows)},
  };
  if (report.conditions) j["conditions"] = conditions_json(*report.conditions);
  return j;
}

}  // namespace leaftree

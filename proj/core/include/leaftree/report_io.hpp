#pragma once

#include "leaftree/bounds.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>

namespace leaftree {

// 15 significant digits; "inf", "-inf" and "nan" spelled out.
std::string format_double(double x, int digits = 15);

inline constexpr const char* kBoundCsvHeader =
    "n,exact_EH,mc_EH,mc_stderr,moment,moment_bound_log,height_bound,membership_ok,pass";

// One header line plus one row per grid point, ordered by n. Monte Carlo
// fields are empty when the report carries no estimate.
void write_bound_report_csv(const BoundReport& report, std::ostream& os);

nlohmann::json bound_report_json(const BoundReport& report);

}  // namespace leaftree

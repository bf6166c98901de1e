#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "kerrpur/protocol.hpp"

namespace kerrpur {

std::string mode_name(const RunMode& mode);

/// Verdict tallies. Exact runs report probability mass; Monte Carlo runs report integer counts.
nlohmann::json counts_json(const Tally& tally, const RunMode& mode);

/// fidelity, yield, pair_fidelity, standard errors and counts. NaN and missing values become null.
nlohmann::json report_json(const RunReport& report);

/// Shortest decimal text that reads back to the same double; "nan" for NaN.
std::string format_number(double value);

/// Append one CSV row, writing `header` first when the file is new or empty.
void append_csv(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::string>& row);

std::string csv_line(const std::vector<std::string>& fields);

}  // namespace kerrpur

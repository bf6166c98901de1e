#include "kerrpur/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace kerrpur {

namespace {

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json optional_number(const std::optional<double>& v) {
    return v ? number_or_null(*v) : nlohmann::json(nullptr);
}

nlohmann::json mass(double v, const RunMode& mode) {
    if (mode.is_exact()) return v;
    return static_cast<std::uint64_t>(std::llround(v));
}

}  // namespace

std::string mode_name(const RunMode& mode) { return mode.is_exact() ? "exact" : "mc"; }

nlohmann::json counts_json(const Tally& t, const RunMode& mode) {
    return {
        {"total", mass(t.total, mode)},
        {"kept_correct", mass(t.kept_correct, mode)},
        {"kept_erroneous", mass(t.kept_erroneous, mode)},
        {"discarded", mass(t.discarded, mode)},
        {"same_mode_double", mass(t.same_mode_double, mode)},
        {"kept_pairs", mass(t.kept_pairs, mode)},
        {"correct_pairs", mass(t.correct_pairs, mode)},
    };
}

nlohmann::json report_json(const RunReport& r) {
    return {
        {"fidelity", number_or_null(r.fidelity)},
        {"yield", number_or_null(r.yield)},
        {"pair_fidelity", number_or_null(r.pair_fidelity)},
        {"fidelity_se", optional_number(r.fidelity_se)},
        {"yield_se", optional_number(r.yield_se)},
        {"counts", counts_json(r.tally, r.mode)},
    };
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string csv_line(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) line += ',';
        line += fields[i];
    }
    return line;
}

void append_csv(const std::string& path, const std::vector<std::string>& header,
                const std::vector<std::string>& row) {
    std::error_code ec;
    const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open CSV file " + path);
    if (fresh) out << csv_line(header) << '\n';
    out << csv_line(row) << '\n';
}

}  // namespace kerrpur

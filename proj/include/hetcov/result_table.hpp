#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hetcov::cli {

/// Flat result rows plus run metadata; round-trips bit-exactly through CSV
/// (17 significant digits, LF line endings).
struct ResultTable {
    struct Row {
        std::string scheme;
        double threshold_db = 0.0;
        double p_cov = 0.0;
        double est_error = 0.0;
        std::string method;  // "analytic" or "simulated"
    };
    std::vector<Row> rows;
    std::uint64_t scenario_hash = 0;
    std::uint64_t seed = 0;
    std::string tool_version;

    void write_csv(std::ostream& out) const;
    void write_csv_file(const std::string& path) const;
    static ResultTable read_csv(std::istream& in);
    static ResultTable read_csv_file(const std::string& path);

    bool operator==(const ResultTable& other) const;
};

std::string format_double17(double v);

}  // namespace hetcov::cli

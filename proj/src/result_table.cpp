#include "hetcov/result_table.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hetcov/errors.hpp"

namespace hetcov::cli {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::string format_double17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void ResultTable::write_csv(std::ostream& out) const {
    out << "# scenario_hash " << scenario_hash << "\n";
    out << "# seed " << seed << "\n";
    out << "# tool_version " << tool_version << "\n";
    out << "scheme,threshold_db,p_cov,est_error,method\n";
    for (const auto& r : rows)
        out << r.scheme << ',' << format_double17(r.threshold_db) << ','
            << format_double17(r.p_cov) << ',' << format_double17(r.est_error) << ','
            << r.method << '\n';
}

void ResultTable::write_csv_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open output file: " + path);
    write_csv(out);
}

ResultTable ResultTable::read_csv(std::istream& in) {
    ResultTable table;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream meta(line.substr(1));
            std::string key;
            meta >> key;
            if (key == "scenario_hash") meta >> table.scenario_hash;
            else if (key == "seed") meta >> table.seed;
            else if (key == "tool_version") meta >> table.tool_version;
            continue;
        }
        if (!saw_header) {
            if (line != "scheme,threshold_db,p_cov,est_error,method")
                throw config_error("ResultTable: unexpected CSV header: " + line);
            saw_header = true;
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 5) throw config_error("ResultTable: malformed CSV row: " + line);
        Row r;
        r.scheme = f[0];
        r.threshold_db = std::stod(f[1]);
        r.p_cov = std::stod(f[2]);
        r.est_error = std::stod(f[3]);
        r.method = f[4];
        table.rows.push_back(std::move(r));
    }
    return table;
}

ResultTable ResultTable::read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open input file: " + path);
    return read_csv(in);
}

bool ResultTable::operator==(const ResultTable& other) const {
    if (scenario_hash != other.scenario_hash || seed != other.seed ||
        tool_version != other.tool_version || rows.size() != other.rows.size())
        return false;
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& a = rows[i];
        const auto& b = other.rows[i];
        if (a.scheme != b.scheme || a.threshold_db != b.threshold_db || a.p_cov != b.p_cov ||
            a.est_error != b.est_error || a.method != b.method)
            return false;
    }
    return true;
}

}  // namespace hetcov::cli

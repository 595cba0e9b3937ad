#include "hetcov/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hetcov/errors.hpp"

namespace hetcov::cli {
namespace {

[[noreturn]] void parse_fail(const std::string& origin, int line, const std::string& why) {
    std::ostringstream msg;
    msg << origin << ":" << line << ": " << why;
    throw config_error(msg.str());
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Tokenized {
    int line;
    std::vector<std::string> tokens;
};

std::vector<Tokenized> tokenize(const std::string& text) {
    std::vector<Tokenized> out;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        Tokenized t{line_no, {}};
        std::string tok;
        while (ls >> tok) t.tokens.push_back(tok);
        if (!t.tokens.empty()) out.push_back(std::move(t));
    }
    return out;
}

double parse_num(const std::string& origin, int line, const std::string& tok) {
    try {
        size_t idx = 0;
        const double v = std::stod(tok, &idx);
        if (idx != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        parse_fail(origin, line, "expected a number, got '" + tok + "'");
    }
}

long parse_int(const std::string& origin, int line, const std::string& tok) {
    const double v = parse_num(origin, line, tok);
    if (v != std::floor(v)) parse_fail(origin, line, "expected an integer, got '" + tok + "'");
    return static_cast<long>(v);
}

}  // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

std::vector<double> Scenario::threshold_grid_linear() const {
    std::vector<double> grid;
    grid.reserve(grid_count);
    for (int i = 0; i < grid_count; ++i) {
        const double db = grid_count == 1
                              ? grid_start_db
                              : grid_start_db + (grid_stop_db - grid_start_db) * i /
                                                    (grid_count - 1);
        grid.push_back(db_to_linear(db));
    }
    return grid;
}

std::string Scenario::canonical_serialization() const {
    std::ostringstream out;
    out << "rx_antennas=" << net.rx_antennas << ";noise_w=" << fmt17(net.noise_power)
        << ";grid=" << fmt17(grid_start_db) << ":" << fmt17(grid_stop_db) << ":"
        << grid_count << ";rate_loss=" << (rate_loss ? 1 : 0) << ";schemes=";
    for (auto s : schemes) out << analytic::scheme_name(s) << ",";
    out << ";sim=" << sim_iterations << "," << sim_seed << "," << sim_mean_bs_per_tier
        << "," << sim_resources_per_frame << ";tiers=";
    for (const auto& t : net.tiers)
        out << "[" << fmt17(t.density) << "," << fmt17(t.power) << ","
            << fmt17(t.path_loss_exp) << "," << t.code.name << "]";
    return out.str();
}

std::uint64_t Scenario::semantic_hash() const {
    const std::string s = canonical_serialization();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
    Scenario sc;
    sc.net.tiers.clear();
    sc.schemes.clear();
    bool have_noise = false, have_rx = false, have_grid = false, have_schemes = false;

    const auto lines = tokenize(text);
    size_t i = 0;
    auto expect_argc = [&](const Tokenized& t, size_t n) {
        if (t.tokens.size() != n + 1)
            parse_fail(origin, t.line,
                       "key '" + t.tokens[0] + "' expects " + std::to_string(n) + " value(s)");
    };
    while (i < lines.size()) {
        const auto& t = lines[i];
        const std::string& key = t.tokens[0];
        if (key == "rx_antennas") {
            expect_argc(t, 1);
            sc.net.rx_antennas = static_cast<int>(parse_int(origin, t.line, t.tokens[1]));
            have_rx = true;
        } else if (key == "noise_dbm") {
            expect_argc(t, 1);
            if (t.tokens[1] == "none")
                sc.net.noise_power = 0.0;
            else
                sc.net.noise_power = dbm_to_watts(parse_num(origin, t.line, t.tokens[1]));
            have_noise = true;
        } else if (key == "grid_db") {
            expect_argc(t, 3);
            sc.grid_start_db = parse_num(origin, t.line, t.tokens[1]);
            sc.grid_stop_db = parse_num(origin, t.line, t.tokens[2]);
            sc.grid_count = static_cast<int>(parse_int(origin, t.line, t.tokens[3]));
            if (sc.grid_count < 1 || (sc.grid_count > 1 && sc.grid_stop_db <= sc.grid_start_db))
                parse_fail(origin, t.line, "grid_db needs start < stop and count >= 1");
            have_grid = true;
        } else if (key == "schemes") {
            if (t.tokens.size() < 2) parse_fail(origin, t.line, "schemes: none given");
            for (size_t j = 1; j < t.tokens.size(); ++j) {
                try {
                    sc.schemes.push_back(analytic::scheme_by_name(t.tokens[j]));
                } catch (const config_error& e) {
                    parse_fail(origin, t.line, e.what());
                }
            }
            have_schemes = true;
        } else if (key == "rate_loss") {
            expect_argc(t, 1);
            if (t.tokens[1] == "on")
                sc.rate_loss = true;
            else if (t.tokens[1] == "off")
                sc.rate_loss = false;
            else
                parse_fail(origin, t.line, "rate_loss must be 'on' or 'off'");
        } else if (key == "tier" || key == "sim") {
            if (t.tokens.size() != 2 || t.tokens[1] != "{")
                parse_fail(origin, t.line, "expected '" + key + " {'");
            const bool is_tier = key == "tier";
            hetnet::TierConfig tier;
            bool have_density = false, have_power = false, have_alpha = false, have_code = false;
            ++i;
            for (;; ++i) {
                if (i >= lines.size()) parse_fail(origin, t.line, "unterminated block '" + key + "'");
                const auto& b = lines[i];
                const std::string& bkey = b.tokens[0];
                if (bkey == "}") break;
                if (is_tier) {
                    if (bkey == "density_per_km2") {
                        expect_argc(b, 1);
                        tier.density = parse_num(origin, b.line, b.tokens[1]) * 1e-6;
                        have_density = true;
                    } else if (bkey == "power_dbm") {
                        expect_argc(b, 1);
                        tier.power = dbm_to_watts(parse_num(origin, b.line, b.tokens[1]));
                        have_power = true;
                    } else if (bkey == "alpha") {
                        expect_argc(b, 1);
                        tier.path_loss_exp = parse_num(origin, b.line, b.tokens[1]);
                        have_alpha = true;
                    } else if (bkey == "code") {
                        expect_argc(b, 1);
                        try {
                            tier.code = hetnet::OstbcCode::by_name(b.tokens[1]);
                        } catch (const config_error& e) {
                            parse_fail(origin, b.line, e.what());
                        }
                        have_code = true;
                    } else {
                        parse_fail(origin, b.line, "unknown tier key '" + bkey + "'");
                    }
                } else {
                    if (bkey == "iterations") {
                        expect_argc(b, 1);
                        sc.sim_iterations = parse_int(origin, b.line, b.tokens[1]);
                    } else if (bkey == "seed") {
                        expect_argc(b, 1);
                        sc.sim_seed = static_cast<std::uint64_t>(
                            parse_int(origin, b.line, b.tokens[1]));
                    } else if (bkey == "mean_bs_per_tier") {
                        expect_argc(b, 1);
                        sc.sim_mean_bs_per_tier =
                            static_cast<int>(parse_int(origin, b.line, b.tokens[1]));
                    } else if (bkey == "resources_per_frame") {
                        expect_argc(b, 1);
                        sc.sim_resources_per_frame =
                            static_cast<int>(parse_int(origin, b.line, b.tokens[1]));
                    } else {
                        parse_fail(origin, b.line, "unknown sim key '" + bkey + "'");
                    }
                }
            }
            if (is_tier) {
                if (!have_density || !have_power || !have_alpha || !have_code)
                    parse_fail(origin, t.line,
                               "tier block requires density_per_km2, power_dbm, alpha, code");
                sc.net.tiers.push_back(tier);
            }
        } else {
            parse_fail(origin, t.line, "unknown key '" + key + "'");
        }
        ++i;
    }
    if (sc.net.tiers.empty()) parse_fail(origin, 0, "no tier blocks given");
    if (!have_rx) parse_fail(origin, 0, "missing rx_antennas");
    if (!have_noise) parse_fail(origin, 0, "missing noise_dbm");
    if (!have_grid) parse_fail(origin, 0, "missing grid_db");
    if (!have_schemes) parse_fail(origin, 0, "missing schemes");
    try {
        sc.net.validate();
    } catch (const config_error& e) {
        parse_fail(origin, 0, e.what());
    }
    return sc;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path);
}

}  // namespace hetcov::cli

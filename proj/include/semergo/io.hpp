#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "semergo/averages.hpp"
#include "semergo/counting.hpp"
#include "semergo/util.hpp"

namespace semergo {

inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Flat key-value config: "key = value" lines, '#' comments. Flags override
// file entries; the hash is taken over the canonical (sorted) rendering so
// field order never matters.
// ---------------------------------------------------------------------------
inline std::map<std::string, std::string> parse_config(std::istream& in) {
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            std::size_t b = s.find_first_not_of(" \t\r");
            std::size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string t = trim(line);
        if (t.empty()) continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
        if (key.empty()) throw ParseError("config line " + std::to_string(lineno) + ": empty key");
        out[key] = value;
    }
    return out;
}

inline std::string config_hash(const std::map<std::string, std::string>& cfg) {
    std::string canonical;
    for (const auto& [k, v] : cfg) canonical += k + "=" + v + "\n";  // map is sorted
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical)));
    return buf;
}

// ---------------------------------------------------------------------------
// Report serialization. CSV rows are (n, empirical, limit, abs_error): the
// empirical column is the signed real value when the statistic is real, the
// modulus otherwise; JSON carries full re/im plus exact rationals.
// ---------------------------------------------------------------------------
namespace detail {

inline bool effectively_real(const AverageReport& rep) {
    if (std::fabs(rep.limit.imag()) > 1e-14) return false;
    for (const Complex& e : rep.empirical)
        if (std::fabs(e.imag()) > 1e-14) return false;
    return true;
}

}  // namespace detail

inline std::string report_to_csv(const AverageReport& rep) {
    bool real = detail::effectively_real(rep);
    std::string out = "n,empirical,limit,abs_error\n";
    double limit = real ? rep.limit.real() : std::abs(rep.limit);
    for (std::size_t i = 0; i < rep.n_grid.size(); ++i) {
        double emp = real ? rep.empirical[i].real() : std::abs(rep.empirical[i]);
        out += std::to_string(rep.n_grid[i]) + "," + format_double(emp) + "," +
               format_double(limit) + "," + format_double(rep.abs_error[i]) + "\n";
    }
    return out;
}

inline nlohmann::json report_to_json(const AverageReport& rep) {
    nlohmann::json j;
    j["statistic"] = rep.statistic;
    j["instance"] = rep.instance;
    j["params"] = rep.params;
    j["n_grid"] = rep.n_grid;
    nlohmann::json emp = nlohmann::json::array();
    for (std::size_t i = 0; i < rep.empirical.size(); ++i) {
        nlohmann::json e;
        e["re"] = rep.empirical[i].real();
        e["im"] = rep.empirical[i].imag();
        if (!rep.empirical_exact[i].empty()) e["exact"] = rep.empirical_exact[i];
        emp.push_back(e);
    }
    j["empirical"] = emp;
    j["limit"] = {{"re", rep.limit.real()}, {"im", rep.limit.imag()}};
    if (!rep.limit_exact.empty()) j["limit"]["exact"] = rep.limit_exact;
    j["abs_error"] = rep.abs_error;
    j["monotone_improving"] = rep.monotone_improving;
    if (rep.clipped_warning) j["clipped_warning"] = true;
    return j;
}

inline std::string count_table_to_csv(const CountTable& t, bool distinct) {
    const auto& table = distinct ? t.small_omega : t.big_omega;
    std::string out = "n,k,count\n";
    for (int n = 0; n <= t.nmax; ++n)
        for (int k = 0; k <= n; ++k) {
            const BigInt& v = table[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
            if (v.is_zero() && !(n == 0 && k == 0)) continue;
            out += std::to_string(n) + "," + std::to_string(k) + "," + v.to_string() + "\n";
        }
    return out;
}

inline nlohmann::json count_table_to_json(const CountTable& t) {
    nlohmann::json j;
    j["instance"] = t.instance_desc;
    j["nmax"] = t.nmax;
    if (!t.q.is_zero()) j["q"] = t.q.to_string();
    nlohmann::json pi = nlohmann::json::array();
    for (int d = 1; d <= t.nmax; ++d) pi.push_back(t.pi[static_cast<std::size_t>(d)].to_string());
    j["pi"] = pi;
    nlohmann::json g = nlohmann::json::array(), gc = nlohmann::json::array();
    for (int n = 0; n <= t.nmax; ++n) {
        g.push_back(t.G[static_cast<std::size_t>(n)].to_string());
        gc.push_back(t.G_cum[static_cast<std::size_t>(n)].to_string());
    }
    j["G"] = g;
    j["G_cumulative"] = gc;
    auto dump = [&](const std::vector<std::vector<BigInt>>& table) {
        nlohmann::json rows = nlohmann::json::array();
        for (int n = 0; n <= t.nmax; ++n) {
            nlohmann::json row = nlohmann::json::array();
            for (int k = 0; k <= n; ++k)
                row.push_back(
                    table[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)].to_string());
            rows.push_back(row);
        }
        return rows;
    };
    j["big_omega"] = dump(t.big_omega);
    j["small_omega"] = dump(t.small_omega);
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << content;
    if (!out) throw Error("write failed: " + path);
}

// Manifest: the one artifact that carries timestamps, kept separate so data
// outputs stay byte-identical across reruns.
inline nlohmann::json run_manifest(const std::map<std::string, std::string>& cfg,
                                   const std::vector<std::string>& report_paths,
                                   const std::string& timestamp) {
    nlohmann::json j;
    j["tool"] = "semergo";
    j["version"] = kToolVersion;
    j["config_hash"] = config_hash(cfg);
    j["config"] = cfg;
    j["timestamp"] = timestamp;
    j["reports"] = report_paths;
    return j;
}

}  // namespace semergo

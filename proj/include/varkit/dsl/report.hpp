#pragma once

#include "varkit/core/rng.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace varkit::dsl {

struct CheckResult {
    std::string name;
    std::string verdict;       // "pass" | "fail" | "inconclusive"
    std::string detail;        // witness expression, residual, or numbers
    bool probabilistic = false;

    bool passed() const { return verdict == "pass"; }
};

/// Structured command outcome. Serialization is deterministic for fixed
/// inputs and seed; only timing_ms varies between runs.
struct ReportDocument {
    std::string schema_version = "1.0";
    std::string command;
    std::string input_file;
    std::string input_digest;
    std::string flags;
    std::uint64_t seed = kDefaultSeed;
    std::vector<CheckResult> checks;
    nlohmann::ordered_json data = nlohmann::ordered_json::object();
    int exit_code = 0;
    double timing_ms = 0.0;

    void add_check(std::string name, bool pass, std::string detail = "", bool probabilistic = false) {
        checks.push_back({std::move(name), pass ? "pass" : "fail", std::move(detail), probabilistic});
    }

    void add_inconclusive(std::string name, std::string detail) {
        checks.push_back({std::move(name), "inconclusive", std::move(detail), false});
    }

    bool all_checks_pass() const {
        for (const auto& c : checks)
            if (c.verdict == "fail") return false;
        return true;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["schema_version"] = schema_version;
        j["command"] = command;
        j["input"] = {{"file", input_file}, {"digest", input_digest}, {"flags", flags}};
        j["seed"] = seed;
        nlohmann::ordered_json cs = nlohmann::ordered_json::array();
        for (const auto& c : checks) {
            nlohmann::ordered_json cj;
            cj["name"] = c.name;
            cj["verdict"] = c.verdict;
            cj["detail"] = c.detail;
            cj["probabilistic"] = c.probabilistic;
            cs.push_back(cj);
        }
        j["checks"] = cs;
        j["data"] = data;
        j["exit_code"] = exit_code;
        j["timing_ms"] = timing_ms;
        return j;
    }

    std::string to_text() const {
        std::string out = "varkit " + command;
        if (!input_file.empty()) out += " " + input_file;
        if (!flags.empty()) out += " " + flags;
        out += "\n";
        for (const auto& c : checks) {
            out += "  [" + std::string(c.verdict == "pass" ? "pass" : c.verdict == "fail" ? "FAIL" : "inconclusive") + "] " + c.name;
            if (!c.detail.empty()) out += ": " + c.detail;
            if (c.probabilistic) out += " (probabilistic)";
            out += "\n";
        }
        for (const auto& [key, value] : data.items()) {
            if (value.is_string())
                out += "  " + key + " = " + value.get<std::string>() + "\n";
            else
                out += "  " + key + " = " + value.dump() + "\n";
        }
        out += exit_code == 0 ? "result: ok\n" : (exit_code == 1 ? "result: check failed\n" : "result: error\n");
        return out;
    }
};

inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace varkit::dsl

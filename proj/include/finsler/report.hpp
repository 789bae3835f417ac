// CheckReport: the structured result every verification run produces, with a
// stable JSON serialization {name, samples, max_residual, threshold, pass,
// details[]} and atomic file output.
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "finsler/errors.hpp"

namespace finsler {

struct CheckReport {
    std::string name;
    long samples = 0;
    double max_residual = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::vector<std::string> details;
};

inline nlohmann::ordered_json to_json(const CheckReport& r) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["samples"] = r.samples;
    j["max_residual"] = r.max_residual;
    j["threshold"] = r.threshold;
    j["pass"] = r.pass;
    j["details"] = r.details;
    return j;
}

// Fixed-format float for detail strings (deterministic across runs).
inline std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Writes text to path via a temporary file in the same directory plus rename,
// so readers never observe a half-written report.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
    namespace fs = std::filesystem;
    fs::path dir = path.parent_path();
    if (!dir.empty()) fs::create_directories(dir);
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open for writing: " + tmp.string());
        out << text;
        if (!out) throw Error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

}  // namespace finsler

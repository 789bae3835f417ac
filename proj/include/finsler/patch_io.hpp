// Patch configuration: a line-oriented key = value text format with quoted
// expression strings, plus the built-in patch catalog.
//
//   name = "euclidean-exact"
//   dim = 2
//   domain = [[-5, 5], [-5, 5]]
//   a = ["1", "0", "0", "1"]
//   b = ["0.2", "0"]
//
// '#' starts a comment; arrays must close on the line they open.
#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/patch.hpp"

namespace finsler {

struct PatchConfig {
    std::string name;
    int dim = 0;
    std::vector<std::pair<double, double>> domain;
    std::vector<std::string> a;  // row-major dim*dim expression strings
    std::vector<std::string> b;  // dim expression strings
};

namespace detail {

struct ConfigValue {
    // scalar string (from quoted text or bare token) or nested array
    std::string scalar;
    std::vector<ConfigValue> array;
    bool is_array = false;
};

inline void skip_spaces(std::string_view s, std::size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

inline ConfigValue parse_value(std::string_view s, std::size_t& i, int line) {
    skip_spaces(s, i);
    if (i >= s.size()) throw ParseError("missing value on line " + std::to_string(line), static_cast<std::size_t>(line));
    ConfigValue v;
    if (s[i] == '[') {
        v.is_array = true;
        ++i;
        skip_spaces(s, i);
        if (i < s.size() && s[i] == ']') {
            ++i;
            return v;
        }
        for (;;) {
            v.array.push_back(parse_value(s, i, line));
            skip_spaces(s, i);
            if (i < s.size() && s[i] == ',') {
                ++i;
                continue;
            }
            if (i < s.size() && s[i] == ']') {
                ++i;
                return v;
            }
            throw ParseError("expected ',' or ']' in array on line " + std::to_string(line),
                             static_cast<std::size_t>(line));
        }
    }
    if (s[i] == '"') {
        ++i;
        std::string out;
        while (i < s.size() && s[i] != '"') out += s[i++];
        if (i >= s.size())
            throw ParseError("unterminated string on line " + std::to_string(line),
                             static_cast<std::size_t>(line));
        ++i;
        v.scalar = out;
        return v;
    }
    std::string out;
    while (i < s.size() && s[i] != ',' && s[i] != ']' && s[i] != '#') out += s[i++];
    while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) out.pop_back();
    if (out.empty())
        throw ParseError("empty value on line " + std::to_string(line), static_cast<std::size_t>(line));
    v.scalar = out;
    return v;
}

inline double to_number(const ConfigValue& v, int line) {
    if (v.is_array)
        throw ParseError("expected a number on line " + std::to_string(line), static_cast<std::size_t>(line));
    try {
        std::size_t used = 0;
        double d = std::stod(v.scalar, &used);
        if (used != v.scalar.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw ParseError("malformed number '" + v.scalar + "' on line " + std::to_string(line),
                         static_cast<std::size_t>(line));
    }
}

inline std::string strip_ws(std::string_view s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    return out;
}

}  // namespace detail

inline PatchConfig parse_patch_text(const std::string& text) {
    PatchConfig cfg;
    bool saw_name = false, saw_dim = false, saw_domain = false, saw_a = false, saw_b = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            // '#' inside a quoted string still counts as content
            bool in_str = false;
            std::size_t cut = std::string::npos;
            for (std::size_t i = 0; i < line.size(); ++i) {
                if (line[i] == '"') in_str = !in_str;
                if (line[i] == '#' && !in_str) {
                    cut = i;
                    break;
                }
            }
            if (cut != std::string::npos) line.erase(cut);
        }
        std::size_t i = 0;
        detail::skip_spaces(line, i);
        if (i >= line.size() || line[i] == '\r') continue;
        std::size_t eq = line.find('=', i);
        if (eq == std::string::npos)
            throw ParseError("expected 'key = value' on line " + std::to_string(lineno),
                             static_cast<std::size_t>(lineno));
        std::string key = line.substr(i, eq - i);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        std::size_t vi = eq + 1;
        detail::ConfigValue val = detail::parse_value(line, vi, lineno);
        detail::skip_spaces(line, vi);
        if (vi < line.size() && line[vi] != '\r')
            throw ParseError("trailing characters after value on line " + std::to_string(lineno),
                             static_cast<std::size_t>(lineno));

        if (key == "name") {
            cfg.name = val.scalar;
            saw_name = true;
        } else if (key == "dim") {
            cfg.dim = static_cast<int>(detail::to_number(val, lineno));
            saw_dim = true;
        } else if (key == "domain") {
            if (!val.is_array)
                throw ParseError("domain must be an array of [lo, hi] pairs (line " +
                                     std::to_string(lineno) + ")",
                                 static_cast<std::size_t>(lineno));
            for (const auto& pair : val.array) {
                if (!pair.is_array || pair.array.size() != 2)
                    throw ParseError("each domain entry must be [lo, hi] (line " +
                                         std::to_string(lineno) + ")",
                                     static_cast<std::size_t>(lineno));
                cfg.domain.emplace_back(detail::to_number(pair.array[0], lineno),
                                        detail::to_number(pair.array[1], lineno));
            }
            saw_domain = true;
        } else if (key == "a" || key == "b") {
            if (!val.is_array)
                throw ParseError("'" + key + "' must be an array of expression strings (line " +
                                     std::to_string(lineno) + ")",
                                 static_cast<std::size_t>(lineno));
            auto& dst = (key == "a") ? cfg.a : cfg.b;
            for (const auto& entry : val.array) {
                if (entry.is_array)
                    throw ParseError("'" + key + "' entries must be strings (line " +
                                         std::to_string(lineno) + ")",
                                     static_cast<std::size_t>(lineno));
                dst.push_back(entry.scalar);
            }
            (key == "a" ? saw_a : saw_b) = true;
        } else {
            throw ParseError("unknown key '" + key + "' on line " + std::to_string(lineno),
                             static_cast<std::size_t>(lineno));
        }
    }
    if (!saw_name || !saw_dim || !saw_domain || !saw_a || !saw_b)
        throw ParseError("patch file must define name, dim, domain, a and b", 0);
    return cfg;
}

// Validates a config and builds the patch: dimension consistency, textual
// symmetry of a (whitespace-insensitive), expression arity, and an SPD spot
// check of a(x) over the domain.
inline ManifoldPatch patch_from_config(const PatchConfig& cfg) {
    if (cfg.dim < 2) throw Error("dim must be at least 2 (got " + std::to_string(cfg.dim) + ")");
    if (static_cast<int>(cfg.domain.size()) != cfg.dim)
        throw Error("domain must have one [lo, hi] pair per coordinate");
    if (static_cast<int>(cfg.a.size()) != cfg.dim * cfg.dim)
        throw Error("a must have dim*dim entries (got " + std::to_string(cfg.a.size()) + ")");
    if (static_cast<int>(cfg.b.size()) != cfg.dim)
        throw Error("b must have dim entries (got " + std::to_string(cfg.b.size()) + ")");
    for (int i = 0; i < cfg.dim; ++i)
        for (int j = i + 1; j < cfg.dim; ++j)
            if (detail::strip_ws(cfg.a[static_cast<std::size_t>(i) * cfg.dim + j]) !=
                detail::strip_ws(cfg.a[static_cast<std::size_t>(j) * cfg.dim + i]))
                throw Error("a is not symmetric: a[" + std::to_string(i + 1) + "][" +
                            std::to_string(j + 1) + "] differs from a[" + std::to_string(j + 1) +
                            "][" + std::to_string(i + 1) + "]");

    Box box;
    for (auto [lo, hi] : cfg.domain) {
        if (!(lo < hi)) throw Error("domain interval must satisfy lo < hi");
        box.lo.push_back(lo);
        box.hi.push_back(hi);
    }
    std::vector<ScalarExpr> a, b;
    for (std::size_t k = 0; k < cfg.a.size(); ++k) {
        try {
            a.push_back(parse_expression(cfg.a[k], cfg.dim));
        } catch (const ParseError& pe) {
            throw Error("a[" + std::to_string(k) + "] = \"" + cfg.a[k] + "\": " + pe.what());
        }
    }
    for (std::size_t k = 0; k < cfg.b.size(); ++k) {
        try {
            b.push_back(parse_expression(cfg.b[k], cfg.dim));
        } catch (const ParseError& pe) {
            throw Error("b[" + std::to_string(k) + "] = \"" + cfg.b[k] + "\": " + pe.what());
        }
    }
    ManifoldPatch patch(cfg.name, box, std::move(a), std::move(b));
    patch.validate_spd_on_grid(3);
    return patch;
}

inline ManifoldPatch load_patch_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open patch file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return patch_from_config(parse_patch_text(ss.str()));
}

// Built-in catalog. The six patches span closed/non-closed b crossed with
// straight/curved geodesics, which is what the theorem-level checks need.
inline std::vector<PatchConfig> catalog() {
    auto flat2 = std::vector<std::string>{"1", "0", "0", "1"};
    auto box2 = std::vector<std::pair<double, double>>{{-5, 5}, {-5, 5}};
    std::vector<PatchConfig> out;
    out.push_back({"riemannian-only", 2, box2, flat2, {"0", "0"}});
    out.push_back({"euclidean-exact", 2, box2, flat2, {"0.2", "0"}});
    out.push_back({"exact-bump", 2, box2, flat2, {"0.1*x1", "0"}});
    out.push_back({"exact-mixed", 2, box2, flat2, {"0.2*x2", "0.2*x1"}});
    out.push_back({"rotational", 2, box2, flat2, {"-0.1*x2", "0.1*x1"}});
    out.push_back({"conformal", 2, box2,
                   {"exp(0.2*x1)", "0", "0", "exp(0.2*x1)"},
                   {"0", "0"}});
    return out;
}

inline ManifoldPatch catalog_patch(const std::string& name) {
    for (const auto& cfg : catalog())
        if (cfg.name == name) return patch_from_config(cfg);
    throw Error("no catalog patch named '" + name + "'");
}

// Writes one catalog entry in the patch file format.
inline std::string config_to_text(const PatchConfig& cfg) {
    std::ostringstream out;
    out << "name = \"" << cfg.name << "\"\n";
    out << "dim = " << cfg.dim << "\n";
    out << "domain = [";
    for (std::size_t i = 0; i < cfg.domain.size(); ++i) {
        if (i) out << ", ";
        out << "[" << cfg.domain[i].first << ", " << cfg.domain[i].second << "]";
    }
    out << "]\n";
    auto emit = [&out](const char* key, const std::vector<std::string>& xs) {
        out << key << " = [";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) out << ", ";
            out << '"' << xs[i] << '"';
        }
        out << "]\n";
    };
    emit("a", cfg.a);
    emit("b", cfg.b);
    return out.str();
}

}  // namespace finsler

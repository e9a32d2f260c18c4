#pragma once

// JSON configuration for the command-line tool.  Every accessor threads a
// field path ("scenarios[2].model.shapes") through to its error message, so a
// bad config names the exact field it trips on; syntax errors report the line.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "orv/driving.hpp"
#include "orv/liouville.hpp"
#include "orv/matrix.hpp"
#include "orv/regvar.hpp"

namespace orv {

class config_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace cfg {

using json = nlohmann::ordered_json;

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
    throw config_error("config: " + path + ": " + what);
}

inline json load_json_file(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw config_error("config: cannot open " + file);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte, text.size());
        for (std::size_t i = 0; i < stop; ++i)
            if (text[i] == '\n') ++line;
        throw config_error("config: " + file + " line " + std::to_string(line) + ": " +
                           e.what());
    }
}

inline const json& member(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.is_object()) fail(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path, "missing required field '" + key + "'");
    return *it;
}

inline double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

inline double number_at(const json& obj, const std::string& path, const std::string& key) {
    return as_number(member(obj, path, key), path + "." + key);
}

inline double number_or(const json& obj, const std::string& path, const std::string& key,
                        double fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    return as_number(obj.at(key), path + "." + key);
}

inline std::uint64_t count_at(const json& obj, const std::string& path,
                              const std::string& key) {
    const json& v = member(obj, path, key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        fail(path + "." + key, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

inline std::uint64_t count_or(const json& obj, const std::string& path, const std::string& key,
                              std::uint64_t fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        fail(path + "." + key, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

inline std::string string_at(const json& obj, const std::string& path, const std::string& key) {
    const json& v = member(obj, path, key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

inline std::string string_or(const json& obj, const std::string& path, const std::string& key,
                             const std::string& fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

inline Vec parse_vec(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) fail(path, "expected a nonempty array of numbers");
    Vec out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline Vec vec_at(const json& obj, const std::string& path, const std::string& key) {
    return parse_vec(member(obj, path, key), path + "." + key);
}

// array whose entries are numbers or the string "inf" (for open upper edges)
inline Vec parse_edges(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) fail(path, "expected a nonempty array");
    Vec out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string at = path + "[" + std::to_string(i) + "]";
        if (v[i].is_string()) {
            if (v[i].get<std::string>() != "inf")
                fail(at, "expected a number or the string \"inf\"");
            out.push_back(std::numeric_limits<double>::infinity());
        } else {
            out.push_back(as_number(v[i], at));
        }
    }
    return out;
}

/// Grid of t values: a single number, an explicit array, or
/// {"from": a, "to": b, "points": n, "spacing": "log"|"linear"}.
inline std::vector<double> parse_grid(const json& v, const std::string& path) {
    if (v.is_number()) return {v.get<double>()};
    if (v.is_array()) {
        const Vec vals = parse_vec(v, path);
        return {vals.begin(), vals.end()};
    }
    if (v.is_object()) {
        const double from = number_at(v, path, "from");
        const double to = number_at(v, path, "to");
        const std::uint64_t points = count_at(v, path, "points");
        const std::string spacing = string_or(v, path, "spacing", "log");
        if (points < 2) fail(path + ".points", "needs at least 2 points");
        if (!(to > from)) fail(path, "'to' must exceed 'from'");
        std::vector<double> out(points);
        if (spacing == "log") {
            if (!(from > 0.0)) fail(path + ".from", "log spacing needs a positive start");
            const double l0 = std::log(from);
            const double l1 = std::log(to);
            for (std::uint64_t k = 0; k < points; ++k)
                out[k] = std::exp(l0 + (l1 - l0) * static_cast<double>(k) /
                                           static_cast<double>(points - 1));
        } else if (spacing == "linear") {
            for (std::uint64_t k = 0; k < points; ++k)
                out[k] = from + (to - from) * static_cast<double>(k) /
                                    static_cast<double>(points - 1);
        } else {
            fail(path + ".spacing", "expected \"log\" or \"linear\"");
        }
        return out;
    }
    fail(path, "expected a number, an array, or {from, to, points}");
}

inline std::vector<double> grid_at(const json& obj, const std::string& path,
                                   const std::string& key) {
    return parse_grid(member(obj, path, key), path + "." + key);
}

inline DrivingFunction parse_driving(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
    const std::string family = string_at(v, path, "family");
    DrivingFunction g;
    try {
        if (family == "inverted-dirichlet") {
            g = inverted_dirichlet_driving(number_at(v, path, "beta"));
        } else if (family == "pareto-log") {
            g = pareto_log_driving(number_at(v, path, "beta"), number_at(v, path, "delta"));
        } else if (family == "exponential") {
            g = exponential_driving(number_at(v, path, "rate"));
        } else if (family == "tabulated") {
            const json& pts = member(v, path, "points");
            if (!pts.is_array()) fail(path + ".points", "expected an array of [t, g] pairs");
            std::vector<std::pair<double, double>> pairs;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const std::string at = path + ".points[" + std::to_string(i) + "]";
                if (!pts[i].is_array() || pts[i].size() != 2)
                    fail(at, "expected a [t, g] pair");
                pairs.emplace_back(as_number(pts[i][0], at), as_number(pts[i][1], at));
            }
            g = tabulated_driving(pairs);
        } else {
            fail(path + ".family", "unknown driving family '" + family + "'");
        }
        const double shift = number_or(v, path, "shift", 0.0);
        const double scale = number_or(v, path, "scale", 1.0);
        if (shift != 0.0 || scale != 1.0) g = shifted_driving(g, shift, scale);
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
    return g;
}

inline LiouvilleModel parse_model(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object");
    Vec shapes = vec_at(v, path, "shapes");
    DrivingFunction g = parse_driving(member(v, path, "driving"), path + ".driving");
    try {
        return make_liouville_model(std::move(shapes), std::move(g));
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
}

inline LiouvilleModel model_at(const json& obj, const std::string& path,
                               const std::string& key) {
    return parse_model(member(obj, path, key), path + "." + key);
}

inline ScalingSpec spec_at(const json& obj, const std::string& path, const std::string& key) {
    Vec exponents = vec_at(obj, path, key);
    try {
        return make_scaling_spec(std::move(exponents));
    } catch (const std::exception& e) {
        fail(path + "." + key, e.what());
    }
}

inline BoxRegion parse_box(const json& v, const std::string& path) {
    if (!v.is_object()) fail(path, "expected an object with 'lower' and 'upper'");
    Vec lower = vec_at(v, path, "lower");
    Vec upper = parse_edges(member(v, path, "upper"), path + ".upper");
    try {
        return make_box(std::move(lower), std::move(upper));
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
}

inline BoxRegion box_at(const json& obj, const std::string& path, const std::string& key) {
    return parse_box(member(obj, path, key), path + "." + key);
}

inline Matrix parse_matrix(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) fail(path, "expected an array of rows");
    const std::size_t d = v.size();
    Matrix m(d);
    for (std::size_t i = 0; i < d; ++i) {
        const std::string at = path + "[" + std::to_string(i) + "]";
        if (!v[i].is_array() || v[i].size() != d)
            fail(at, "expected a row of " + std::to_string(d) + " numbers");
        for (std::size_t j = 0; j < d; ++j)
            m(i, j) = as_number(v[i][j], at + "[" + std::to_string(j) + "]");
    }
    return m;
}

inline Matrix matrix_at(const json& obj, const std::string& path, const std::string& key) {
    return parse_matrix(member(obj, path, key), path + "." + key);
}

// ---------------------------------------------------------------------------
// Scenario suite
// ---------------------------------------------------------------------------

struct ScenarioConfig {
    std::string name;
    std::string operation;
    bool expect_fail = false;
    json params;  // the full scenario object
};

struct SuiteConfig {
    std::vector<ScenarioConfig> scenarios;
};

inline const std::vector<std::string>& known_operations() {
    static const std::vector<std::string> ops = {
        "sample",         "density",          "verify-density-ratio",
        "verify-tail-prob", "verify-scaling", "verify-weyl",
        "verify-conditional", "estimate-index"};
    return ops;
}

inline std::string output_slug(const std::string& name) {
    std::string s;
    for (const char c : name) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) {
            s += static_cast<char>(std::tolower(u));
        } else if (!s.empty() && s.back() != '-') {
            s += '-';
        }
    }
    while (!s.empty() && s.back() == '-') s.pop_back();
    return s.empty() ? "scenario" : s;
}

inline SuiteConfig parse_suite(const json& root) {
    if (!root.is_object()) throw config_error("config: top level must be an object");
    const json& arr = member(root, "top level", "scenarios");
    if (!arr.is_array() || arr.empty())
        fail("scenarios", "expected a nonempty array of scenario objects");

    SuiteConfig suite;
    std::vector<std::string> slugs;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = "scenarios[" + std::to_string(i) + "]";
        const json& s = arr[i];
        if (!s.is_object()) fail(path, "expected an object");

        ScenarioConfig sc;
        sc.name = string_at(s, path, "name");
        if (sc.name.empty()) fail(path + ".name", "must not be empty");
        sc.operation = string_at(s, path, "operation");
        const auto& ops = known_operations();
        if (std::find(ops.begin(), ops.end(), sc.operation) == ops.end()) {
            std::string list;
            for (const auto& op : ops) list += (list.empty() ? "" : ", ") + op;
            fail(path + ".operation", "unknown operation '" + sc.operation +
                                          "' (known: " + list + ")");
        }
        const std::string expect = string_or(s, path, "expect", "pass");
        if (expect != "pass" && expect != "fail")
            fail(path + ".expect", "expected \"pass\" or \"fail\"");
        sc.expect_fail = expect == "fail";
        sc.params = s;

        for (const auto& other : suite.scenarios)
            if (other.name == sc.name)
                fail(path + ".name", "duplicate scenario name '" + sc.name + "'");
        const std::string slug = output_slug(sc.name);
        if (std::find(slugs.begin(), slugs.end(), slug) != slugs.end())
            fail(path + ".name", "output file name '" + slug + ".csv' collides with an "
                                 "earlier scenario");
        slugs.push_back(slug);
        suite.scenarios.push_back(std::move(sc));
    }
    return suite;
}

inline SuiteConfig load_suite(const std::string& file) {
    return parse_suite(load_json_file(file));
}

// ---------------------------------------------------------------------------
// Command-line overrides
// ---------------------------------------------------------------------------

namespace detail {

struct PathStep {
    std::string key;
    std::vector<std::size_t> indices;
};

inline std::vector<PathStep> parse_override_path(const std::string& p) {
    std::vector<PathStep> steps;
    std::size_t i = 0;
    while (i < p.size()) {
        PathStep step;
        while (i < p.size() && p[i] != '.' && p[i] != '[') step.key += p[i++];
        if (step.key.empty())
            throw config_error("config: malformed override path '" + p + "'");
        while (i < p.size() && p[i] == '[') {
            ++i;
            std::size_t idx = 0;
            bool any = false;
            while (i < p.size() && p[i] >= '0' && p[i] <= '9') {
                idx = idx * 10 + static_cast<std::size_t>(p[i] - '0');
                ++i;
                any = true;
            }
            if (!any || i >= p.size() || p[i] != ']')
                throw config_error("config: malformed override path '" + p + "'");
            ++i;
            step.indices.push_back(idx);
        }
        steps.push_back(std::move(step));
        if (i < p.size()) {
            if (p[i] != '.' || i + 1 == p.size())
                throw config_error("config: malformed override path '" + p + "'");
            ++i;
        }
    }
    if (steps.empty()) throw config_error("config: empty override path");
    return steps;
}

}  // namespace detail

/// Apply a "path=value" assignment (e.g. "scenarios[0].draws=1000") to the
/// raw document before it is parsed.  The value is read as JSON when it
/// parses, and kept as a plain string otherwise.
inline void apply_override(json& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw config_error("config: override '" + assignment +
                           "' must have the form path=value");
    const std::string pathstr = assignment.substr(0, eq);
    const std::string valstr = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(valstr);
    } catch (const json::parse_error&) {
        value = valstr;
    }

    const auto steps = detail::parse_override_path(pathstr);
    json* node = &root;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const auto& st = steps[k];
        const bool last_step = k + 1 == steps.size();
        if (!node->is_object())
            throw config_error("config: override '" + pathstr +
                               "' walks through a non-object");
        if (st.indices.empty()) {
            if (last_step) {
                (*node)[st.key] = value;
                return;
            }
            if (!node->contains(st.key))
                throw config_error("config: override '" + pathstr +
                                   "' names missing field '" + st.key + "'");
            node = &(*node)[st.key];
            continue;
        }
        if (!node->contains(st.key))
            throw config_error("config: override '" + pathstr + "' names missing field '" +
                               st.key + "'");
        node = &(*node)[st.key];
        for (std::size_t j = 0; j < st.indices.size(); ++j) {
            if (!node->is_array() || st.indices[j] >= node->size())
                throw config_error("config: override '" + pathstr +
                                   "' indexes outside an array");
            const bool last_index = last_step && j + 1 == st.indices.size();
            if (last_index) {
                (*node)[st.indices[j]] = value;
                return;
            }
            node = &(*node)[st.indices[j]];
        }
    }
}

/// Force one seed onto every scenario, overriding whatever the file says.
inline void apply_seed(json& root, std::uint64_t seed) {
    if (!root.is_object() || !root.contains("scenarios")) return;
    json& arr = root["scenarios"];
    if (!arr.is_array()) return;
    for (auto& s : arr)
        if (s.is_object()) s["seed"] = seed;
}

}  // namespace cfg
}  // namespace orv

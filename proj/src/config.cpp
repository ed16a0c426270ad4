#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "pentasing/cli.hpp"
#include "pentasing/errors.hpp"
#include "pentasing/scalar.hpp"

namespace pentasing::cli {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw config_error("config: " + what); }

// JSON number, or a string holding an integer, "p/q" rational, or decimal
double number_from(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        try {
            return to_double(Rat(s));
        } catch (...) {
        }
        char* end = nullptr;
        double x = std::strtod(s.c_str(), &end);
        if (end && *end == '\0' && !s.empty() && std::isfinite(x)) return x;
        fail(where + ": cannot parse number \"" + s + "\"");
    }
    fail(where + ": expected a number or a numeric string");
}

long long integer_from(const json& v, const std::string& where) {
    double x = number_from(v, where);
    if (std::floor(x) != x || std::abs(x) > 9e15) fail(where + ": expected an integer");
    return static_cast<long long>(x);
}

std::array<double, 3> triple_from(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3) fail(where + ": expected an array of 3 numbers");
    return {number_from(v[0], where), number_from(v[1], where), number_from(v[2], where)};
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || item.key() == k;
        if (!ok) fail(where + ": unknown key \"" + item.key() + "\"");
    }
}

}  // namespace

const char* mode_name(distance::Mode mode) {
    switch (mode) {
        case distance::Mode::fixed_orientation: return "fixed-orientation";
        case distance::Mode::fixed_position: return "fixed-position";
        case distance::Mode::general: return "general";
        case distance::Mode::equiform: return "equiform";
    }
    return "general";
}

std::optional<distance::Mode> mode_from(const std::string& name) {
    if (name == "fixed-orientation") return distance::Mode::fixed_orientation;
    if (name == "fixed-position") return distance::Mode::fixed_position;
    if (name == "general") return distance::Mode::general;
    if (name == "equiform") return distance::Mode::equiform;
    return std::nullopt;
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

JobConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        fail(std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) fail("top level must be an object");
    check_keys(root,
               {"architecture", "pose", "mode", "tol", "seed", "starts", "box", "format", "param",
                "mesh"},
               "top level");

    JobConfig cfg;

    if (!root.contains("architecture")) fail("missing \"architecture\"");
    {
        const json& a = root["architecture"];
        if (!a.is_object()) fail("\"architecture\" must be an object");
        check_keys(a, {"base", "r"}, "architecture");
        if (!a.contains("base") || !a["base"].is_array() || a["base"].size() != 5)
            fail("architecture.base: expected 5 points");
        if (!a.contains("r") || !a["r"].is_array() || a["r"].size() != 5)
            fail("architecture.r: expected 5 offsets");
        for (std::size_t j = 0; j < 5; ++j) {
            auto p = triple_from(a["base"][j], "architecture.base[" + std::to_string(j) + "]");
            cfg.arch.base[j] = {p[0], p[1], p[2]};
            cfg.arch.r[j] = number_from(a["r"][j], "architecture.r[" + std::to_string(j) + "]");
        }
    }

    if (!root.contains("pose")) fail("missing \"pose\"");
    {
        const json& p = root["pose"];
        if (!p.is_object()) fail("\"pose\" must be an object");
        check_keys(p, {"orientation", "position"}, "pose");
        if (!p.contains("orientation") || !p.contains("position"))
            fail("pose: need \"orientation\" and \"position\"");
        auto o = triple_from(p["orientation"], "pose.orientation");
        auto q = triple_from(p["position"], "pose.position");
        cfg.pose.dir = {o[0], o[1], o[2]};
        cfg.pose.pos = {q[0], q[1], q[2]};
        double n = cfg.pose.dir.norm();
        double off = std::abs(n - 1);
        if (off >= 1e-6)
            fail("pose.orientation: norm " + fmt(n) + " is not unit length");
        if (off > 1e-12) {
            cfg.pose.dir /= n;
            cfg.warnings.push_back("pose.orientation normalized (|norm - 1| = " + fmt(off) + ")");
        }
    }

    if (root.contains("mode")) {
        if (!root["mode"].is_string()) fail("\"mode\" must be a string");
        auto m = mode_from(root["mode"].get<std::string>());
        if (!m) fail("unknown mode \"" + root["mode"].get<std::string>() + "\"");
        cfg.mode = *m;
    }
    if (root.contains("tol")) {
        cfg.tol = number_from(root["tol"], "tol");
        if (!(cfg.tol > 0)) fail("tol must be positive");
    }
    if (root.contains("seed")) {
        long long s = integer_from(root["seed"], "seed");
        if (s < 0) fail("seed must be nonnegative");
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    if (root.contains("starts")) {
        long long s = integer_from(root["starts"], "starts");
        if (s < 0 || s > 100000000) fail("starts out of range");
        cfg.starts = static_cast<int>(s);
    }
    if (root.contains("box")) {
        cfg.box = number_from(root["box"], "box");
        if (cfg.box < 0) fail("box must be nonnegative");
    }
    if (root.contains("format")) {
        if (!root["format"].is_string()) fail("\"format\" must be a string");
        cfg.format = root["format"].get<std::string>();
        if (cfg.format != "csv" && cfg.format != "json")
            fail("format must be \"csv\" or \"json\"");
    }

    if (root.contains("param")) {
        const json& p = root["param"];
        if (!p.is_object()) fail("\"param\" must be an object");
        check_keys(p, {"count", "range", "t"}, "param");
        if (p.contains("count")) {
            long long c = integer_from(p["count"], "param.count");
            if (c < 0 || c > 10000000) fail("param.count out of range");
            cfg.param_count = static_cast<int>(c);
        }
        if (p.contains("range")) {
            cfg.param_range = number_from(p["range"], "param.range");
            if (!(cfg.param_range > 0)) fail("param.range must be positive");
        }
        if (p.contains("t")) {
            if (!p["t"].is_array()) fail("param.t must be an array of 4-vectors");
            for (std::size_t k = 0; k < p["t"].size(); ++k) {
                const json& row = p["t"][k];
                const std::string where = "param.t[" + std::to_string(k) + "]";
                if (!row.is_array() || row.size() != 4) fail(where + ": expected 4 numbers");
                cfg.param_t.push_back({number_from(row[0], where), number_from(row[1], where),
                                       number_from(row[2], where), number_from(row[3], where)});
            }
        }
    }

    if (root.contains("mesh")) {
        const json& m = root["mesh"];
        if (!m.is_object()) fail("\"mesh\" must be an object");
        check_keys(m, {"grid", "slices", "box"}, "mesh");
        if (m.contains("grid")) {
            long long g = integer_from(m["grid"], "mesh.grid");
            if (g < 2 || g > 4096) fail("mesh.grid out of range");
            cfg.mesh_grid = static_cast<int>(g);
        }
        if (m.contains("slices")) {
            long long s = integer_from(m["slices"], "mesh.slices");
            if (s < 4 || s > 65536) fail("mesh.slices out of range");
            cfg.mesh_slices = static_cast<int>(s);
        }
        if (m.contains("box")) {
            cfg.mesh_box = number_from(m["box"], "mesh.box");
            if (!(cfg.mesh_box > 0)) fail("mesh.box must be positive");
        }
    }

    return cfg;
}

JobConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace pentasing::cli

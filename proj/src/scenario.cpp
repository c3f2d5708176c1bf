#include "dirac/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>

#include "dirac/csv.hpp"
#include "dirac/dynamics.hpp"
#include "dirac/fibers2d.hpp"
#include "dirac/lattice.hpp"
#include "dirac/linalg.hpp"
#include "dirac/resolvent_hs.hpp"
#include "dirac/spectral.hpp"
#include "dirac/transforms.hpp"

namespace dirac {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- parsing

class Parser {
public:
    Parser(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        throw ConfigError(source_ + ":" + std::to_string(line_of(key)) + ": " + msg);
    }

    // Line of the first `"key":` in the document, 1 when absent.
    int line_of(const std::string& key) const {
        if (key.empty()) return 1;
        const std::string needle = "\"" + key + "\"";
        std::size_t pos = 0;
        while ((pos = text_.find(needle, pos)) != std::string::npos) {
            std::size_t q = pos + needle.size();
            while (q < text_.size() && std::isspace(static_cast<unsigned char>(text_[q]))) ++q;
            if (q < text_.size() && text_[q] == ':') return line_at(pos);
            pos += needle.size();
        }
        return 1;
    }

    int line_at(std::size_t byte) const {
        byte = std::min(byte, text_.size());
        return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + byte, '\n'));
    }

    void allow(const json& obj, const std::string& where, std::initializer_list<const char*> keys) const {
        if (!obj.is_object()) fail(where, "'" + where + "' must be an object");
        const std::set<std::string> ok(keys.begin(), keys.end());
        for (auto it = obj.begin(); it != obj.end(); ++it)
            if (!ok.count(it.key())) fail(it.key(), "unknown key '" + it.key() + "' in " + where);
    }

    double number(const json& obj, const char* key, double def) const {
        if (!obj.contains(key)) return def;
        const json& v = obj.at(key);
        if (!v.is_number()) fail(key, std::string("'") + key + "' must be a number");
        return v.get<double>();
    }

    int integer(const json& obj, const char* key, int def) const {
        if (!obj.contains(key)) return def;
        const json& v = obj.at(key);
        if (!v.is_number_integer()) fail(key, std::string("'") + key + "' must be an integer");
        return v.get<int>();
    }

    std::string string(const json& obj, const char* key, const std::string& def) const {
        if (!obj.contains(key)) return def;
        const json& v = obj.at(key);
        if (!v.is_string()) fail(key, std::string("'") + key + "' must be a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const json& obj, const char* key, std::vector<double> def) const {
        if (!obj.contains(key)) return def;
        const json& v = obj.at(key);
        if (!v.is_array()) fail(key, std::string("'") + key + "' must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) fail(key, std::string("'") + key + "' must be an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    Interval interval(const json& obj, const char* key, Interval def) const {
        if (!obj.contains(key)) return def;
        const std::vector<double> v = numbers(obj, key, {});
        if (v.size() != 2 || !(v[0] < v[1])) fail(key, std::string("'") + key + "' must be [lo, hi] with lo < hi");
        return {v[0], v[1]};
    }

    cplx complex(const json& obj, const char* key, cplx def) const {
        if (!obj.contains(key)) return def;
        if (obj.at(key).is_number()) return {obj.at(key).get<double>(), 0.0};
        const std::vector<double> v = numbers(obj, key, {});
        if (v.size() != 2) fail(key, std::string("'") + key + "' must be a number or [re, im]");
        return {v[0], v[1]};
    }

    const std::string& source() const { return source_; }

private:
    const std::string& text_;
    std::string source_;
};

Piece parse_piece(const Parser& P, const json& j) {
    P.allow(j, "piece", {"kind", "center", "width", "amplitude", "cutoff"});
    Piece p;
    const std::string kind = P.string(j, "kind", "gaussian");
    if (kind == "gaussian") p.kind = Piece::Kind::Gaussian;
    else if (kind == "box") p.kind = Piece::Kind::Box;
    else if (kind == "raised-cosine") p.kind = Piece::Kind::RaisedCosine;
    else P.fail("kind", "unknown piece kind '" + kind + "'");
    p.center = P.number(j, "center", 0.0);
    p.width = P.number(j, "width", 1.0);
    p.amplitude = P.number(j, "amplitude", 1.0);
    p.cutoff = P.number(j, "cutoff", 6.0);
    if (!(p.width > 0.0)) P.fail("width", "piece width must be positive");
    return p;
}

Tail parse_tail(const Parser& P, const json& j) {
    P.allow(j, "tail", {"kind", "slope", "exponent", "value", "rate", "r0", "ramp_width", "ramp_power"});
    Tail t;
    const std::string kind = P.string(j, "kind", "none");
    if (kind == "none") t.kind = Tail::Kind::None;
    else if (kind == "linear") t.kind = Tail::Kind::Linear;
    else if (kind == "power") t.kind = Tail::Kind::Power;
    else if (kind == "constant") t.kind = Tail::Kind::Constant;
    else if (kind == "logistic") t.kind = Tail::Kind::Logistic;
    else P.fail("kind", "unknown tail kind '" + kind + "'");
    t.slope = P.number(j, "slope", 1.0);
    t.exponent = P.number(j, "exponent", 1.0);
    t.value0 = P.number(j, "value", 0.0);
    t.rate = P.number(j, "rate", 1.0);
    t.r0 = P.number(j, "r0", 1.0);
    t.ramp_width = P.number(j, "ramp_width", 1.0);
    t.ramp_power = P.integer(j, "ramp_power", 1);
    if (!(t.r0 > 0.0)) P.fail("r0", "tail cutoff r0 must be positive");
    if (!(t.ramp_width > 0.0)) P.fail("ramp_width", "ramp width must be positive");
    if (t.ramp_power < 1) P.fail("ramp_power", "ramp power must be at least 1");
    return t;
}

void parse_potential(const Parser& P, const json& j, PotentialSpec& s) {
    P.allow(j, "potential", {"v1", "a1", "v2", "a2"});
    for (const char* key : {"v1", "a1"}) {
        if (!j.contains(key)) continue;
        if (!j.at(key).is_array()) P.fail(key, std::string("'") + key + "' must be a list of pieces");
        auto& dst = std::string(key) == "v1" ? s.v1 : s.a1;
        for (const auto& e : j.at(key)) dst.push_back(parse_piece(P, e));
    }
    if (j.contains("v2")) s.v2 = parse_tail(P, j.at("v2"));
    if (j.contains("a2")) s.a2 = parse_tail(P, j.at("a2"));
}

void check_packet(const Parser& P, const json& j) {
    P.allow(j, "packet", {"center", "width", "momentum", "u1", "u2", "jitter"});
    if (P.number(j, "width", 1.0) <= 0.0) P.fail("width", "packet width must be positive");
    if (P.number(j, "jitter", 0.0) < 0.0) P.fail("jitter", "jitter must be non-negative");
}

double max_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

void validate_task(const Parser& P, const Scenario& sc, const json& t) {
    const std::string type = P.string(t, "type", "");
    const bool half = sc.potential.geometry == Geometry::HalfLine;
    const double edge = sc.grid.length;  // distance from the origin to the wall
    if (type == "check-hypothesis") {
        P.allow(t, type, {"type", "hypothesis", "audit_step", "audit_extent", "expect"});
        try {
            hypothesis_from_string(P.string(t, "hypothesis", "H1"));
        } catch (const ConfigError& e) {
            P.fail("hypothesis", e.what());
        }
        if (t.contains("expect") && !t.at("expect").is_boolean()) P.fail("expect", "'expect' must be true or false");
        if (P.number(t, "audit_step", 1e-3) <= 0.0) P.fail("audit_step", "audit step must be positive");
    } else if (type == "spectrum") {
        P.allow(t, type, {"type", "window"});
        P.interval(t, "window", {-2.0, 2.0});
    } else if (type == "hs-scan") {
        P.allow(t, type, {"type", "widths", "z", "delta_min", "expect_exponent", "tolerance"});
        const std::vector<double> w = P.numbers(t, "widths", {0.5, 1, 2, 4, 8});
        if (w.size() < 2) P.fail("widths", "hs-scan needs at least two widths");
        const double reach = half ? P.number(t, "delta_min", 1.0) + max_of(w) : 0.5 * max_of(w);
        if (reach >= edge) P.fail("widths", "largest window reaches the truncation wall");
        if (std::abs(P.complex(t, "z", I).imag()) <= 0.0) P.fail("z", "z must be off the real axis");
    } else if (type == "kernel-check") {
        P.allow(t, type, {"type", "dx", "length", "columns", "row_limit", "min_order"});
        if (!half) P.fail("type", "kernel-check needs the half-line geometry");
        if (P.numbers(t, "dx", {0.04, 0.02, 0.01}).size() < 2) P.fail("dx", "kernel-check needs at least two spacings");
    } else if (type == "boost-verify") {
        P.allow(t, type, {"type", "dx", "direction", "trim", "z", "min_order"});
        if (P.numbers(t, "dx", {0.04, 0.02, 0.01}).size() < 2) P.fail("dx", "boost-verify needs at least two spacings");
        try {
            hypothesis_from_string(P.string(t, "direction", "H1"));
        } catch (const ConfigError& e) {
            P.fail("direction", e.what());
        }
        const double trim = P.number(t, "trim", 0.1);
        if (trim < 0.0 || trim >= 1.0) P.fail("trim", "trim must lie in [0, 1)");
    } else if (type == "evolve" || type == "ballistic-fit" || type == "fiber-2d") {
        if (type == "evolve")
            P.allow(t, type, {"type", "packet", "delta", "taper", "times", "p"});
        else if (type == "ballistic-fit")
            P.allow(t, type, {"type", "packet", "delta", "taper", "p", "T_points", "T_range", "slack", "tolerance"});
        else
            P.allow(t, type, {"type", "kind", "labels", "amplitudes", "packet", "delta", "taper", "p", "T_points",
                              "n2", "dx2", "Q", "tolerance"});
        if (t.contains("packet")) check_packet(P, t.at("packet"));
        P.interval(t, "delta", {-3.0, 3.0});
        const double taper = P.number(t, "taper", 0.5);
        if (taper < 0.0 || taper > 1.0) P.fail("taper", "taper must lie in [0, 1]");
        // statically checkable part of the horizon discipline
        if (type == "evolve") {
            const std::vector<double> ts = P.numbers(t, "times", {0, 1, 2, 4, 8});
            if (max_of(ts) >= edge) P.fail("times", "evolution time reaches the truncation wall");
        }
        if (type == "ballistic-fit" && t.contains("T_range")) {
            const Interval r = P.interval(t, "T_range", {});
            if (r.lo <= 0.0) P.fail("T_range", "T_range must be positive");
            if (r.hi >= edge) P.fail("T_range", "T_range reaches the truncation wall");
        }
        if (P.integer(t, "T_points", 8) < 2) P.fail("T_points", "need at least two T points");
        if (type == "fiber-2d") {
            const std::string kind = P.string(t, "kind", half ? "rotation" : "translation");
            if (kind == "translation") {
                if (half) P.fail("kind", "translation fibers need the line geometry");
                const int n2 = P.integer(t, "n2", 5);
                if (n2 < 1) P.fail("n2", "n2 must be positive");
                if (t.contains("labels")) P.fail("labels", "translation labels are fixed by n2 and dx2");
                const std::vector<double> a = P.numbers(t, "amplitudes", {});
                if (!a.empty() && static_cast<int>(a.size()) != n2) P.fail("amplitudes", "need one amplitude per fiber");
            } else if (kind == "rotation") {
                if (!half) P.fail("kind", "rotation channels need the half-line geometry");
                const std::vector<double> ks = P.numbers(t, "labels", {});
                if (ks.empty()) P.fail("labels", "rotation needs a list of channels");
                const std::vector<double> a = P.numbers(t, "amplitudes", {});
                if (!a.empty() && a.size() != ks.size()) P.fail("amplitudes", "need one amplitude per channel");
                if (P.integer(t, "Q", 16) < 2) P.fail("Q", "Q must be at least 2");
            } else {
                P.fail("kind", "unknown fiber kind '" + kind + "'");
            }
        }
    } else if (type.empty()) {
        P.fail("tasks", "task without a 'type'");
    } else {
        P.fail("type", "unknown task type '" + type + "'");
    }
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& source) {
    Parser P(text, source);
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ":" + std::to_string(P.line_at(e.byte == 0 ? 0 : e.byte - 1)) +
                          ": malformed JSON: " + e.what());
    }
    P.allow(root, "scenario", {"name", "seed", "geometry", "grid", "operator", "potential", "tasks"});
    Scenario sc;
    sc.name = P.string(root, "name", "");
    if (sc.name.empty()) P.fail("name", "scenario needs a non-empty name");
    if (sc.name.find_first_of("/\\ ") != std::string::npos || sc.name == "." || sc.name == "..")
        P.fail("name", "scenario name must be a plain directory name");
    const int seed = P.integer(root, "seed", 1);
    if (seed < 0) P.fail("seed", "seed must be non-negative");
    sc.seed = static_cast<unsigned>(seed);
    try {
        sc.potential.geometry = geometry_from_string(P.string(root, "geometry", "line"));
    } catch (const ConfigError& e) {
        P.fail("geometry", e.what());
    }
    const bool half = sc.potential.geometry == Geometry::HalfLine;

    if (root.contains("grid")) {
        const json& g = root.at("grid");
        P.allow(g, "grid", {"length", "dx"});
        sc.grid.length = P.number(g, "length", sc.grid.length);
        sc.grid.dx = P.number(g, "dx", sc.grid.dx);
    }
    if (!(sc.grid.dx > 0.0)) P.fail("dx", "grid spacing must be positive");
    if (!(sc.grid.length > 2.0 * sc.grid.dx)) P.fail("length", "grid length must exceed two spacings");

    if (root.contains("operator")) {
        const json& o = root.at("operator");
        if (half) P.allow(o, "half-line operator", {"k", "mass", "alpha"});
        else P.allow(o, "line operator", {"xi", "mass"});
        sc.op.xi = P.number(o, "xi", 0.0);
        sc.op.k = P.number(o, "k", 0.5);
        sc.op.mass = P.number(o, "mass", 0.0);
        if (o.contains("alpha")) sc.op.alpha = P.number(o, "alpha", 0.0);
    }
    if (half) {
        // validated by a trial assembly on a tiny grid
        try {
            const Grid tiny = make_halfline_grid(4.0 * sc.grid.dx, sc.grid.dx);
            PotentialSpec zero;
            zero.geometry = Geometry::HalfLine;
            assemble_halfline(tiny, zero, sc.op.k, sc.op.mass, sc.op.alpha);
        } catch (const ConfigError& e) {
            P.fail(sc.op.alpha ? "alpha" : "k", e.what());
        }
    }

    if (root.contains("potential")) parse_potential(P, root.at("potential"), sc.potential);

    if (!root.contains("tasks") || !root.at("tasks").is_array() || root.at("tasks").empty())
        P.fail("tasks", "scenario needs a non-empty 'tasks' list");
    for (const auto& t : root.at("tasks")) {
        if (!t.is_object()) P.fail("tasks", "every task must be an object");
        validate_task(P, sc, t);
        sc.tasks.push_back({t.at("type").get<std::string>(), t});
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ":1: cannot open config");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path);
}

// ---------------------------------------------------------------- builtins

namespace {

const std::map<std::string, std::string>& builtins() {
    static const std::map<std::string, std::string> m = {
        {"free-line-hs", R"({
  "name": "free-line-hs",
  "geometry": "line",
  "grid": {"length": 40, "dx": 0.01},
  "tasks": [
    {"type": "hs-scan", "widths": [0.5, 1, 2, 4, 8], "expect_exponent": 0.5, "tolerance": 0.05}
  ]
})"},
        {"halfline-hs", R"({
  "name": "halfline-hs",
  "geometry": "half-line",
  "grid": {"length": 40, "dx": 0.01},
  "operator": {"k": 0.5},
  "tasks": [
    {"type": "hs-scan", "widths": [0.5, 1, 2, 4, 8], "delta_min": 1, "expect_exponent": 0.5, "tolerance": 0.05}
  ]
})"},
        {"linear-field-hs", R"({
  "name": "linear-field-hs",
  "geometry": "line",
  "grid": {"length": 40, "dx": 0.01},
  "potential": {"v2": {"kind": "linear", "slope": 1},
                "a2": {"kind": "linear", "slope": 0.5, "ramp_power": 2}},
  "tasks": [
    {"type": "check-hypothesis", "hypothesis": "H1"},
    {"type": "hs-scan", "widths": [0.5, 1, 2, 4, 8], "expect_exponent": 0.5, "tolerance": 0.1}
  ]
})"},
        {"free-kernel", R"({
  "name": "free-kernel",
  "geometry": "half-line",
  "grid": {"length": 20, "dx": 0.02},
  "operator": {"k": 0},
  "tasks": [
    {"type": "kernel-check", "dx": [0.04, 0.02, 0.01], "min_order": 1.8}
  ]
})"},
        {"boost-identity", R"({
  "name": "boost-identity",
  "geometry": "line",
  "grid": {"length": 16, "dx": 0.02},
  "potential": {"v2": {"kind": "linear", "slope": 1},
                "a2": {"kind": "linear", "slope": 0.5, "ramp_power": 2}},
  "tasks": [
    {"type": "check-hypothesis", "hypothesis": "H1"},
    {"type": "boost-verify", "dx": [0.04, 0.02, 0.01, 0.005], "direction": "H1", "trim": 0.5, "min_order": 0.9}
  ]
})"},
        {"hypothesis-audit", R"({
  "name": "hypothesis-audit",
  "geometry": "line",
  "potential": {"v1": [{"kind": "gaussian", "center": 0, "width": 0.5, "amplitude": 2}],
                "v2": {"kind": "linear", "slope": 1, "ramp_power": 2},
                "a2": {"kind": "linear", "slope": 2}},
  "tasks": [
    {"type": "check-hypothesis", "hypothesis": "H1", "expect": false},
    {"type": "check-hypothesis", "hypothesis": "H1'"}
  ]
})"},
        {"free-ballistic", R"({
  "name": "free-ballistic",
  "geometry": "line",
  "grid": {"length": 40, "dx": 0.02},
  "tasks": [
    {"type": "evolve", "packet": {"center": 1, "width": 2, "u1": 1, "u2": 0.5},
     "delta": [-6, 6], "taper": 0, "times": [0, 4, 8, 16, 24], "p": 2},
    {"type": "ballistic-fit", "packet": {"width": 1}, "delta": [-3, 3], "taper": 0.5, "p": [1, 2]}
  ]
})"},
        {"linear-field-ballistic", R"({
  "name": "linear-field-ballistic",
  "geometry": "line",
  "grid": {"length": 50, "dx": 0.025},
  "potential": {"v2": {"kind": "linear", "slope": 1},
                "a2": {"kind": "linear", "slope": 0.5, "ramp_power": 2}},
  "tasks": [
    {"type": "check-hypothesis", "hypothesis": "H1"},
    {"type": "ballistic-fit", "packet": {"width": 1}, "delta": [-3, 3], "taper": 0.5, "p": [1, 2]}
  ]
})"},
        {"halfline-ballistic", R"({
  "name": "halfline-ballistic",
  "geometry": "half-line",
  "grid": {"length": 120, "dx": 0.03},
  "operator": {"k": 0.5},
  "potential": {"v2": {"kind": "linear", "slope": 1},
                "a2": {"kind": "linear", "slope": 0.5, "ramp_power": 2}},
  "tasks": [
    {"type": "ballistic-fit", "packet": {"center": 0, "width": 0.5}, "delta": [-6, -0.5], "taper": 0.5, "p": [1, 2]}
  ]
})"},
        {"translation-fibers", R"({
  "name": "translation-fibers",
  "geometry": "line",
  "grid": {"length": 50, "dx": 0.025},
  "potential": {"v2": {"kind": "linear", "slope": 1},
                "a2": {"kind": "linear", "slope": 0.5, "ramp_power": 2}},
  "tasks": [
    {"type": "fiber-2d", "kind": "translation", "n2": 5, "dx2": 6.283185307179586,
     "amplitudes": [0.6, 0.9, 1, 0.8, 0.5], "packet": {"width": 1}, "delta": [-3, 3], "taper": 0.5, "p": [1, 2]}
  ]
})"},
        {"rotation-channels", R"({
  "name": "rotation-channels",
  "geometry": "half-line",
  "grid": {"length": 120, "dx": 0.03},
  "potential": {"v2": {"kind": "linear", "slope": 1},
                "a2": {"kind": "linear", "slope": 0.5, "ramp_power": 2}},
  "tasks": [
    {"type": "fiber-2d", "kind": "rotation", "labels": [-1.5, -0.5, 0.5, 1.5, 2.5], "Q": 16,
     "amplitudes": [0.5, 0.9, 1, 0.7, 0.6], "packet": {"center": 0, "width": 0.5}, "delta": [-6, -0.5], "taper": 0.5, "p": [1, 2]}
  ]
})"},
        {"linear-field-spectrum", R"({
  "name": "linear-field-spectrum",
  "geometry": "line",
  "grid": {"length": 30, "dx": 0.02},
  "potential": {"v2": {"kind": "linear", "slope": 1},
                "a2": {"kind": "linear", "slope": 0.5, "ramp_power": 2}},
  "tasks": [
    {"type": "spectrum", "window": [-2, 2]}
  ]
})"},
    };
    return m;
}

}  // namespace

std::vector<std::string> builtin_scenarios() {
    std::vector<std::string> names;
    for (const auto& [k, v] : builtins()) names.push_back(k);
    return names;
}

std::string builtin_scenario_text(const std::string& name) {
    const auto it = builtins().find(name);
    if (it == builtins().end()) throw ConfigError("unknown builtin scenario '" + name + "'");
    return it->second;
}

// ---------------------------------------------------------------- running

bool RunResult::ok() const {
    return std::all_of(tasks.begin(), tasks.end(), [](const TaskStatus& t) { return t.ok; });
}

std::string artifact_root() {
    const char* env = std::getenv("DIRAC_ARTIFACTS");
    return (env && *env) ? std::string(env) : std::string("artifacts");
}

namespace {

struct TaskFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

class Runner {
public:
    Runner(const Scenario& sc, fs::path dir) : sc_(sc), dir_(std::move(dir)), parser_(text_, sc.name) {}

    TaskStatus run(std::size_t index) {
        const Task& task = sc_.tasks[index];
        TaskStatus st;
        char buf[16];
        std::snprintf(buf, sizeof buf, "%02zu-", index + 1);
        prefix_ = buf + task.type;
        st.label = prefix_;
        files_.clear();
        try {
            const json& t = task.params;
            rng_.seed(sc_.seed + 7919u * static_cast<unsigned>(index));
            std::string msg;
            bool ok = true;
            if (task.type == "check-hypothesis") ok = hypothesis(t, msg);
            else if (task.type == "spectrum") ok = spectrum(t, msg);
            else if (task.type == "hs-scan") ok = hs(t, msg);
            else if (task.type == "kernel-check") ok = kernel(t, msg);
            else if (task.type == "boost-verify") ok = boost(t, msg);
            else if (task.type == "evolve") ok = evolve_task(t, msg);
            else if (task.type == "ballistic-fit") ok = ballistic(t, msg);
            else if (task.type == "fiber-2d") ok = fibers(t, msg);
            st.ok = ok;
            st.message = msg;
        } catch (const std::exception& e) {
            st.ok = false;
            st.message = std::string("error: ") + e.what();
        }
        st.files = files_;
        return st;
    }

private:
    const Scenario& sc_;
    fs::path dir_;
    std::string text_;
    Parser parser_;
    std::string prefix_;
    std::vector<std::string> files_;
    std::mt19937 rng_;

    bool half() const { return sc_.potential.geometry == Geometry::HalfLine; }

    Grid grid(double dx) const {
        return half() ? make_halfline_grid(sc_.grid.length, dx) : make_line_grid(sc_.grid.length, dx);
    }
    Grid grid() const { return grid(sc_.grid.dx); }

    DiracMatrix op(const Grid& g, std::optional<double> label = std::nullopt) const {
        if (half())
            return assemble_halfline(g, sc_.potential, label.value_or(sc_.op.k), sc_.op.mass, sc_.op.alpha);
        return assemble_line(g, sc_.potential, label.value_or(sc_.op.xi), sc_.op.mass);
    }

    CsvTable table(const std::vector<std::string>& cols, const Grid& g) const {
        CsvTable t(sc_.name, cols);
        t.meta("task", prefix_);
        t.meta("geometry", to_string(g.geometry));
        t.meta("grid_nodes", static_cast<double>(g.n));
        t.meta("grid_dx", g.dx);
        t.meta("grid_length", sc_.grid.length);
        t.meta("edge_distance", g.edge_distance());
        if (half()) {
            t.meta("k", sc_.op.k);
            if (sc_.op.alpha) t.meta("alpha", *sc_.op.alpha);
        } else {
            t.meta("xi", sc_.op.xi);
        }
        t.meta("mass", sc_.op.mass);
        t.meta("seed", static_cast<double>(sc_.seed));
        return t;
    }

    void save(const CsvTable& t, const std::string& stem, const std::string& plot = "") {
        const std::string csv = prefix_ + "-" + stem + ".csv";
        t.save((dir_ / csv).string());
        files_.push_back(csv);
        if (plot.empty()) return;
        const std::string gp = prefix_ + "-" + stem + ".gp";
        std::ofstream os(dir_ / gp, std::ios::binary);
        os << "set datafile separator ','\n"
           << "set key autotitle columnhead\n"
           << "set terminal pngcairo size 900,600\n"
           << "set output '" << prefix_ << "-" << stem << ".png'\n"
           << plot << "\n";
        files_.push_back(gp);
    }

    Envelope envelope(const json& t) {
        Envelope env;
        if (half()) env.center = 2.0;
        if (!t.contains("packet")) return env;
        const json& p = t.at("packet");
        env.center = parser_.number(p, "center", env.center);
        env.width = parser_.number(p, "width", 1.0);
        env.momentum = parser_.number(p, "momentum", 0.0);
        env.u1 = parser_.complex(p, "u1", {1.0, 0.0});
        env.u2 = parser_.complex(p, "u2", {0.0, 0.0});
        const double jitter = parser_.number(p, "jitter", 0.0);
        if (jitter > 0.0) {
            std::uniform_real_distribution<double> u(-jitter, jitter);
            env.center += u(rng_);
        }
        return env;
    }

    struct Prepared {
        Grid g;
        DiracMatrix H;
        std::unique_ptr<EigenSystem> es;
        Interval delta;
        ProxyState proxy;
        std::unique_ptr<Propagator> prop;
        double horizon = 0.0, heisenberg = 0.0, t_hi = 0.0;
    };

    std::unique_ptr<Prepared> prepare(const json& t, const Envelope& env,
                                      std::optional<double> label = std::nullopt) {
        auto p = std::make_unique<Prepared>();
        p->g = grid();
        p->H = op(p->g, label);
        p->delta = parser_.interval(t, "delta", {-3.0, 3.0});
        p->es = std::make_unique<EigenSystem>(eigensystem(p->H, p->delta.lo - 0.5, p->delta.hi + 0.5));
        ProxyOptions po;
        po.taper = parser_.number(t, "taper", 0.5);
        p->proxy = ac_proxy_state(*p->es, p->delta, env, po);
        p->prop = std::make_unique<Propagator>(*p->es, p->proxy.psi);
        p->horizon = horizon(p->proxy.psi);
        p->heisenberg = heisenberg_time(*p->es, p->delta);
        p->t_hi = std::min(p->horizon, p->heisenberg);
        return p;
    }

    void packet_meta(CsvTable& tab, const Prepared& p) const {
        tab.meta("delta_lo", p.delta.lo);
        tab.meta("delta_hi", p.delta.hi);
        tab.meta("horizon", p.horizon);
        tab.meta("heisenberg_time", p.heisenberg);
        tab.meta("lipschitz_certificate", p.proxy.split.cert.ok ? "ok" : "failed: " + p.proxy.split.cert.note);
        tab.meta("lipschitz_alpha", p.proxy.split.cert.alpha);
        tab.meta("kept_fraction", p.proxy.kept_fraction);
    }

    // ------------------------------------------------------------ tasks

    bool hypothesis(const json& t, std::string& msg) {
        const Hypothesis h = hypothesis_from_string(parser_.string(t, "hypothesis", "H1"));
        AuditOptions a;
        a.step = parser_.number(t, "audit_step", a.step);
        a.extent = parser_.number(t, "audit_extent", std::max(a.extent, sc_.grid.length));
        const bool expect = t.contains("expect") ? t.at("expect").get<bool>() : true;
        const HypothesisReport r = check_hypothesis(sc_.potential, h, a);
        const Grid g = grid();

        CsvTable tab = table({"hypothesis", "passed", "ratio_sup", "deriv_sup", "theta_max", "support_ok"}, g);
        tab.meta("audit_step", a.step);
        tab.meta("audit_extent", a.extent);
        for (std::size_t i = 0; i < r.messages.size(); ++i) tab.meta("message_" + std::to_string(i), r.messages[i]);
        tab.row({to_string(h), static_cast<long long>(r.passed), r.ratio_sup, r.deriv_sup, r.theta_max,
                 static_cast<long long>(r.support_ok)});
        save(tab, "report");

        const SampledFields s = sample_potential(sc_.potential, g);
        CsvTable f = table({"x", "V", "A", "V2", "A2"}, g);
        for (std::size_t i = 0; i < s.x.size(); ++i) f.row({s.x[i], s.V[i], s.A[i], s.V2[i], s.A2[i]});
        save(f, "potential", "plot for [c=2:5] '" + prefix_ + "-potential.csv' using 1:c with lines");

        msg = to_string(h) + (r.passed ? " holds" : " fails") + ", ratio_sup " + fmt(r.ratio_sup) +
              ", theta_max " + fmt(r.theta_max);
        for (const auto& m : r.messages) msg += "; " + m;
        if (r.passed != expect) msg += expect ? " (expected to hold)" : " (expected to fail)";
        return r.passed == expect;
    }

    bool spectrum(const json& t, std::string& msg) {
        const Interval w = parser_.interval(t, "window", {-2.0, 2.0});
        const Grid g = grid();
        const DiracMatrix H = op(g);
        const EigenSystem es = eigensystem(H, w.lo, w.hi);
        const double res = es.count() ? es.max_residual(H) : 0.0;
        CsvTable tab = table({"index", "eigenvalue"}, g);
        tab.meta("window_lo", w.lo);
        tab.meta("window_hi", w.hi);
        tab.meta("max_residual", res);
        tab.meta("residual_tolerance", 1e-8);
        for (int i = 0; i < es.count(); ++i) tab.row({static_cast<long long>(i), es.values(i)});
        save(tab, "eigenvalues", "plot '" + prefix_ + "-eigenvalues.csv' using 1:2 with points");
        msg = std::to_string(es.count()) + " eigenvalues in [" + fmt(w.lo) + ", " + fmt(w.hi) +
              "], max residual " + fmt(res);
        return res <= 1e-8;
    }

    bool hs(const json& t, std::string& msg) {
        const std::vector<double> widths = parser_.numbers(t, "widths", {0.5, 1, 2, 4, 8});
        HSOptions o;
        o.z = parser_.complex(t, "z", I);
        o.delta_min = parser_.number(t, "delta_min", 1.0);
        const Grid g = grid();
        const DiracMatrix H = op(g);
        const std::vector<Interval> wins = half() ? anchored_windows(widths, o.delta_min) : centered_windows(widths);
        const HSScan s = hs_scan(H, wins, o);
        CsvTable tab = table({"width", "lo", "hi", "hs", "hs_over_sqrt_width"}, g);
        tab.meta("z_re", o.z.real());
        tab.meta("z_im", o.z.imag());
        tab.meta("fit_exponent", s.fit_exponent);
        tab.meta("fit_constant", s.fit_constant);
        tab.meta("fit_residual", s.fit_residual);
        tab.meta("constant_spread", s.constant_spread());
        for (std::size_t i = 0; i < wins.size(); ++i)
            tab.row({s.widths[i], wins[i].lo, wins[i].hi, s.hs_values[i], s.constants[i]});
        bool ok = std::isfinite(s.fit_exponent);
        if (t.contains("expect_exponent")) {
            const double e = parser_.number(t, "expect_exponent", 0.5);
            const double tol = parser_.number(t, "tolerance", 0.05);
            tab.meta("expected_exponent", e);
            tab.meta("tolerance", tol);
            ok = ok && std::abs(s.fit_exponent - e) <= tol;
        }
        save(tab, "scan",
             "set logscale xy\nplot '" + prefix_ + "-scan.csv' using 1:4 with linespoints, sqrt(x) title 'sqrt|I|'");
        msg = "HS exponent " + fmt(s.fit_exponent) + ", constant " + fmt(s.fit_constant);
        return ok;
    }

    bool kernel(const json& t, std::string& msg) {
        const std::vector<double> dxs = parser_.numbers(t, "dx", {0.04, 0.02, 0.01});
        const std::vector<double> cols = parser_.numbers(t, "columns", {0.5, 1.0, 2.0});
        const double length = parser_.number(t, "length", sc_.grid.length);
        const double rows = parser_.number(t, "row_limit", std::min(10.0, 0.5 * length));
        std::vector<double> errs;
        std::vector<KernelCheck> ks;
        for (double dx : dxs) {
            ks.push_back(kernel_check(dx, length, cols, rows));
            errs.push_back(ks.back().max_error);
        }
        const std::vector<double> ord = observed_orders(errs);
        CsvTable tab = table({"dx", "max_error", "max_kernel", "order"}, grid());
        tab.meta("kernel_length", length);
        tab.meta("row_limit", rows);
        for (std::size_t i = 0; i < ks.size(); ++i)
            tab.row({ks[i].dx, ks[i].max_error, ks[i].max_kernel,
                     i == 0 ? std::numeric_limits<double>::quiet_NaN() : ord[i - 1]});
        bool ok = errs.back() < errs.front();
        if (t.contains("min_order")) {
            const double m = parser_.number(t, "min_order", 1.0);
            tab.meta("min_order", m);
            ok = ok && std::all_of(ord.begin(), ord.end(), [m](double o) { return o >= m; });
        }
        save(tab, "convergence", "set logscale xy\nplot '" + prefix_ + "-convergence.csv' using 1:2 with linespoints");
        msg = "kernel error " + fmt(errs.front()) + " -> " + fmt(errs.back()) + ", last order " +
              (ord.empty() ? std::string("n/a") : fmt(ord.back()));
        return ok;
    }

    bool boost(const json& t, std::string& msg) {
        const std::vector<double> dxs = parser_.numbers(t, "dx", {0.04, 0.02, 0.01});
        const Hypothesis dir = hypothesis_from_string(parser_.string(t, "direction", "H1"));
        const double trim = parser_.number(t, "trim", 0.1);
        const cplx z = parser_.complex(t, "z", I);
        OperatorInputs in;
        in.xi = sc_.op.xi;
        in.k = sc_.op.k;
        in.mass = sc_.op.mass;
        std::vector<ResolventIdentityReport> rs;
        std::vector<double> r1;
        bool bound_ok = true;
        for (double dx : dxs) {
            const Grid g = grid(dx);
            rs.push_back(verify_resolvent_identity(assemble_plain(sc_.potential, g, in),
                                                   assemble_boosted(sc_.potential, g, in, dir),
                                                   boost_fields(sc_.potential, g, dir), z, trim));
            r1.push_back(rs.back().r1);
            bound_ok = bound_ok && rs.back().bound_ok;
        }
        const std::vector<double> ord = observed_orders(r1);
        CsvTable tab = table({"dx", "r1", "norm_boosted", "norm_plain", "bound", "bound_ok", "order"}, grid());
        tab.meta("direction", to_string(dir));
        tab.meta("trim", trim);
        tab.meta("z_re", z.real());
        tab.meta("z_im", z.imag());
        for (std::size_t i = 0; i < rs.size(); ++i)
            tab.row({dxs[i], rs[i].r1, rs[i].norm_boosted, rs[i].norm_plain, rs[i].bound,
                     static_cast<long long>(rs[i].bound_ok),
                     i == 0 ? std::numeric_limits<double>::quiet_NaN() : ord[i - 1]});
        bool ok = bound_ok && r1.back() <= r1.front();
        if (t.contains("min_order")) {
            const double m = parser_.number(t, "min_order", 0.9);
            tab.meta("min_order", m);
            ok = ok && std::all_of(ord.begin(), ord.end(), [m](double o) { return o >= m; });
        }
        save(tab, "identity", "set logscale xy\nplot '" + prefix_ + "-identity.csv' using 1:2 with linespoints");
        msg = "residual " + fmt(r1.front()) + " -> " + fmt(r1.back()) + ", norm bound " +
              (bound_ok ? "holds" : "VIOLATED");
        return ok;
    }

    bool evolve_task(const json& t, std::string& msg) {
        const Envelope env = envelope(t);
        auto p = prepare(t, env);
        const std::vector<double> ts = parser_.numbers(t, "times", {0, 1, 2, 4, 8});
        const double pw = parser_.number(t, "p", 2.0);
        CsvTable tab = table({"t", "norm_squared", "moment"}, p->g);
        packet_meta(tab, *p);
        tab.meta("p", pw);
        tab.meta("norm_tolerance", 1e-8);
        double drift = 0.0;
        bool inside = true;
        for (double tt : ts) {
            if (tt > p->horizon) inside = false;
            const WavePacket s = p->prop->at(tt);
            drift = std::max(drift, std::abs(s.norm_squared() - p->proxy.psi.norm_squared()));
            tab.row({tt, s.norm_squared(), p->prop->moment(tt, pw)});
        }
        save(tab, "moments", "plot '" + prefix_ + "-moments.csv' using 1:3 with linespoints");
        msg = "norm drift " + fmt(drift) + ", horizon " + fmt(p->horizon);
        if (!inside) msg += "; sample times beyond the horizon";
        return drift <= 1e-8 && inside;
    }

    bool ballistic(const json& t, std::string& msg) {
        const Envelope env = envelope(t);
        auto p = prepare(t, env);
        const int nT = parser_.integer(t, "T_points", 8);
        const Interval range = parser_.interval(t, "T_range", {p->t_hi / 10.0, p->t_hi});
        if (range.hi > p->horizon) throw TaskFailure("T_range exceeds the horizon " + fmt(p->horizon));
        const std::vector<double> Ts = log_grid(range.lo, range.hi, nT);
        const std::vector<double> ps = parser_.numbers(t, "p", {1.0, 2.0});
        const double slack = parser_.number(t, "slack", 0.05);
        const double tol = parser_.number(t, "tolerance", 0.1);
        const double x0 = packet_extent(p->proxy.psi);
        std::vector<double> ts = Ts;
        for (int i = 0; i <= 24; ++i) ts.push_back(range.hi * i / 24.0);
        std::sort(ts.begin(), ts.end());

        CsvTable tab = table({"p", "T", "cesaro_moment"}, p->g);
        packet_meta(tab, *p);
        tab.meta("exponent_tolerance", tol);
        tab.meta("causality_slack", slack);
        CsvTable caus = table({"p", "t", "ratio", "passed"}, p->g);
        packet_meta(caus, *p);
        caus.meta("x0", x0);
        caus.meta("causality_slack", slack);
        bool ok = p->proxy.split.cert.ok;
        msg = std::string("certificate ") + (ok ? "ok" : "failed");
        for (double pw : ps) {
            const BallisticReport r = ballistic_fit(*p->prop, pw, Ts, p->horizon);
            const CausalityReport c = causality_check(*p->prop, pw, ts, x0, slack);
            tab.meta("exponent_p" + fmt(pw), r.fitted_exponent);
            tab.meta("constant_p" + fmt(pw), r.fitted_constant);
            for (std::size_t i = 0; i < r.T_values.size(); ++i) tab.row({pw, r.T_values[i], r.cesaro_values[i]});
            for (std::size_t i = 0; i < c.t_values.size(); ++i)
                caus.row({pw, c.t_values[i], c.ratios[i], static_cast<long long>(c.passed[i])});
            const bool e_ok = std::abs(r.fitted_exponent - pw) <= tol * pw;
            ok = ok && e_ok && c.all_passed;
            msg += ", p=" + fmt(pw) + " exponent " + fmt(r.fitted_exponent) + (e_ok ? "" : " (out of band)") +
                   ", causality " + (c.all_passed ? "ok" : "VIOLATED");
        }
        save(tab, "cesaro", "set logscale xy\nplot '" + prefix_ + "-cesaro.csv' using 2:3 with linespoints");
        save(caus, "causality", "plot '" + prefix_ + "-causality.csv' using 2:3 with points");
        return ok;
    }

    bool fibers(const json& t, std::string& msg) {
        const bool rot = parser_.string(t, "kind", half() ? "rotation" : "translation") == "rotation";
        const Envelope env = envelope(t);
        FiberFamily fam;
        std::vector<double> labels;
        if (rot) {
            fam.kind = FiberKind::Rotation;
            fam.Q = parser_.integer(t, "Q", 16);
            labels = parser_.numbers(t, "labels", {});
        } else {
            fam.kind = FiberKind::Translation;
            fam.n2 = parser_.integer(t, "n2", 5);
            fam.dx2 = parser_.number(t, "dx2", 2.0 * 3.141592653589793);
            labels = dual_grid(fam.n2, fam.dx2);
        }
        std::vector<double> amp = parser_.numbers(t, "amplitudes", std::vector<double>(labels.size(), 1.0));
        std::vector<std::unique_ptr<Prepared>> fib;
        double tmin = std::numeric_limits<double>::infinity();
        bool cert = true;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            fib.push_back(prepare(t, env, labels[i]));
            WavePacket s = fib.back()->proxy.psi;
            s.amplitudes *= amp[i];
            s.norm = s.recompute_norm();
            fam.labels.push_back(labels[i]);
            fam.states.push_back(s);
            fam.weights.push_back(s.norm_squared());
            tmin = std::min(tmin, fib.back()->t_hi);
            cert = cert && fib.back()->proxy.split.cert.ok;
        }
        // round trip through the 2D field
        FiberFamily back;
        if (rot) back = fiber_rotation(inverse_rotation(fam), labels);
        else back = fiber_translation(inverse_translation(fam));
        const double cons = std::abs(back.weight_sum() - back.total) / back.total;
        const std::vector<double> Ts = log_grid(tmin / 10.0, tmin, parser_.integer(t, "T_points", 8));
        const std::vector<double> ps = parser_.numbers(t, "p", {1.0, 2.0});
        const double tol = parser_.number(t, "tolerance", 0.1);
        const Grid g = grid();

        CsvTable wt = table({"label", "weight", "horizon", "heisenberg_time", "certificate"}, g);
        wt.meta("kind", to_string(fam.kind));
        wt.meta("total_weight", back.total);
        wt.meta("conservation_error", cons);
        for (std::size_t i = 0; i < labels.size(); ++i)
            wt.row({back.labels[i], back.weights[i], fib[i]->horizon, fib[i]->heisenberg,
                    static_cast<long long>(fib[i]->proxy.split.cert.ok)});
        save(wt, "fibers");

        CsvTable agg = table({"p", "T", "moment", "lower_bound"}, g);
        agg.meta("kind", to_string(fam.kind));
        agg.meta("exponent_tolerance", tol);
        bool ok = cert && cons <= 1e-6;
        msg = to_string(fam.kind) + " family of " + std::to_string(labels.size()) + ", conservation " + fmt(cons);
        if (!cert) msg += ", certificate failed";
        const std::vector<int> sel = select_labels(back);
        for (double pw : ps) {
            std::vector<std::optional<BallisticReport>> reps;
            for (std::size_t i = 0; i < labels.size(); ++i) {
                const Propagator P(*fib[i]->es, back.states[i]);
                reps.push_back(ballistic_fit(P, pw, Ts, fib[i]->horizon));
            }
            const AggregateReport a = aggregate_lower_bound(back, reps, pw, sel);
            agg.meta("exponent_p" + fmt(pw), a.fitted_exponent);
            agg.meta("selected_weight_p" + fmt(pw), a.selected_weight / a.total_weight);
            for (std::size_t i = 0; i < a.T_values.size(); ++i)
                agg.row({pw, a.T_values[i], a.moment_values[i], a.bound_values[i]});
            const bool e_ok = std::abs(a.fitted_exponent - pw) <= tol * pw;
            ok = ok && e_ok && a.dominates;
            msg += ", p=" + fmt(pw) + " exponent " + fmt(a.fitted_exponent) + (e_ok ? "" : " (out of band)") +
                   (a.dominates ? "" : ", bound NOT dominated");
        }
        save(agg, "aggregate", "set logscale xy\nplot '" + prefix_ + "-aggregate.csv' using 2:3 with linespoints");
        return ok;
    }
};

}  // namespace

RunResult run_scenario(const Scenario& sc, const std::string& root) {
    RunResult out;
    const fs::path dir = fs::path(root) / sc.name;
    fs::create_directories(dir);
    out.directory = dir.string();
    Runner r(sc, dir);
    for (std::size_t i = 0; i < sc.tasks.size(); ++i) out.tasks.push_back(r.run(i));

    CsvTable m(sc.name, {"task", "status", "message", "files"});
    m.meta("tasks", static_cast<double>(sc.tasks.size()));
    for (const auto& t : out.tasks) {
        std::string files;
        for (const auto& f : t.files) files += (files.empty() ? "" : ";") + f;
        m.row({t.label, std::string(t.ok ? "ok" : "failed"), t.message, files});
    }
    m.save((dir / "manifest.csv").string());
    return out;
}

}  // namespace dirac

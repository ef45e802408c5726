#include "confocal/scenario.hpp"

#include <fstream>
#include <sstream>

#include "confocal/secular.hpp"
#include "confocal/util.hpp"
#include <json.hpp>

namespace confocal {

using ordered_json = nlohmann::ordered_json;

SystemSelector Scenario::selector() const {
    SystemSelector sys;
    sys.which = system;
    sys.params = params;
    sys.qtol = run.qtol;
    return sys;
}

std::vector<Wall> Scenario::resolved_walls() const {
    std::vector<Wall> out;
    out.reserve(walls.size());
    for (const WallSpec& ws : walls) {
        Wall w = Wall::confocal(ws.kind, ws.s, ws.branch, params, ws.offset);
        w.arc = ws.arc;
        w.validate(params.space);
        out.push_back(w);
    }
    return out;
}

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& where, const std::string& msg) {
    throw std::runtime_error(origin + ": " + where + ": " + msg);
}

void reject_unknown(const ordered_json& obj, const std::string& origin, const std::string& where,
                    std::initializer_list<const char*> known) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) fail(origin, where, "unknown key '" + key + "'");
    }
}

double get_number(const ordered_json& obj, const std::string& origin, const std::string& where,
                  const char* key, std::optional<double> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        fail(origin, where, std::string("missing key '") + key + "'");
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(origin, where + "." + key, "expected a number");
    return v.get<double>();
}

Vec2 get_vec2(const ordered_json& obj, const std::string& origin, const std::string& where,
              const char* key, std::optional<Vec2> fallback = {}) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        fail(origin, where, std::string("missing key '") + key + "'");
    }
    const auto& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        fail(origin, where + "." + key, "expected [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
}

Which parse_which(const std::string& s, const std::string& origin) {
    if (s == "kepler") return Which::kepler;
    if (s == "two_center") return Which::two_center;
    if (s == "lagrange") return Which::lagrange;
    if (s == "averaged") return Which::averaged;
    fail(origin, "system", "unknown system '" + s + "'");
}

SpaceKind parse_space(const std::string& s, const std::string& origin) {
    if (s == "euclidean") return SpaceKind::euclidean;
    if (s == "spherical") return SpaceKind::spherical;
    if (s == "hyperbolic") return SpaceKind::hyperbolic;
    fail(origin, "space", "unknown space '" + s + "'");
}

WallKind parse_wall_kind(const std::string& s, const std::string& origin, const std::string& where) {
    if (s == "ellipse") return WallKind::ellipse;
    if (s == "hyperbola_branch") return WallKind::hyperbola_branch;
    if (s == "focal_line") return WallKind::focal_line;
    fail(origin, where, "unknown wall kind '" + s + "'");
}

std::map<std::string, double> parse_bounds(const ordered_json& obj, const std::string& origin,
                                           const std::string& where,
                                           std::initializer_list<const char*> known) {
    reject_unknown(obj, origin, where, known);
    std::map<std::string, double> out;
    for (const auto& [key, value] : obj.items()) {
        if (!value.is_number()) fail(origin, where + "." + key, "expected a number");
        out[key] = value.get<double>();
    }
    return out;
}

Scenario parse_document(const ordered_json& doc, const std::string& origin) {
    if (!doc.is_object()) fail(origin, "$", "scenario must be a JSON object");
    reject_unknown(doc, origin, "$",
                   {"name", "system", "space", "params", "initial_state", "walls", "run", "checks",
                    "seed"});

    Scenario sc;
    if (!doc.contains("name") || !doc.at("name").is_string())
        fail(origin, "$", "missing string key 'name'");
    sc.name = doc.at("name").get<std::string>();
    if (!doc.contains("system") || !doc.at("system").is_string())
        fail(origin, "$", "missing string key 'system'");
    sc.system = parse_which(doc.at("system").get<std::string>(), origin);
    if (!doc.contains("space") || !doc.at("space").is_string())
        fail(origin, "$", "missing string key 'space'");
    sc.params.space = Space{parse_space(doc.at("space").get<std::string>(), origin)};

    if (doc.contains("params")) {
        const auto& p = doc.at("params");
        if (!p.is_object()) fail(origin, "params", "expected an object");
        reject_unknown(p, origin, "params", {"m1", "m2", "f", "a"});
        sc.params.m1 = get_number(p, origin, "params", "m1", 1.0);
        sc.params.m2 = get_number(p, origin, "params", "m2", 0.0);
        sc.params.f = get_number(p, origin, "params", "f", 0.0);
        sc.params.a = get_number(p, origin, "params", "a", 1.0);
    }

    if (doc.contains("initial_state")) {
        const auto& st = doc.at("initial_state");
        if (!st.is_object()) fail(origin, "initial_state", "expected an object");
        reject_unknown(st, origin, "initial_state", {"q", "v", "t"});
        sc.initial_state.q = get_vec2(st, origin, "initial_state", "q");
        sc.initial_state.v = get_vec2(st, origin, "initial_state", "v");
        sc.initial_state.t = get_number(st, origin, "initial_state", "t", 0.0);
    } else {
        fail(origin, "$", "missing key 'initial_state'");
    }

    if (doc.contains("walls")) {
        const auto& walls = doc.at("walls");
        if (!walls.is_array()) fail(origin, "walls", "expected an array");
        for (std::size_t i = 0; i < walls.size(); ++i) {
            const std::string where = "walls[" + std::to_string(i) + "]";
            const auto& w = walls[i];
            if (!w.is_object()) fail(origin, where, "expected an object");
            reject_unknown(w, origin, where, {"kind", "s", "branch", "offset", "arc"});
            WallSpec ws;
            if (!w.contains("kind") || !w.at("kind").is_string())
                fail(origin, where, "missing string key 'kind'");
            ws.kind = parse_wall_kind(w.at("kind").get<std::string>(), origin, where);
            ws.s = get_number(w, origin, where, "s", 0.0);
            ws.branch = static_cast<int>(get_number(w, origin, where, "branch", 1.0));
            ws.offset = get_vec2(w, origin, where, "offset", Vec2{0.0, 0.0});
            if (w.contains("arc")) {
                const auto& arc = w.at("arc");
                if (!arc.is_array() || arc.size() != 2)
                    fail(origin, where + ".arc", "expected [phi0, phi1]");
                ws.arc = ArcWindow{arc[0].get<double>(), arc[1].get<double>()};
            }
            sc.walls.push_back(ws);
        }
    }

    if (doc.contains("run")) {
        const auto& r = doc.at("run");
        if (!r.is_object()) fail(origin, "run", "expected an object");
        reject_unknown(r, origin, "run", {"t_end", "tol", "qtol", "max_bounces", "samples"});
        sc.run.t_end = get_number(r, origin, "run", "t_end", sc.run.t_end);
        sc.run.tol = get_number(r, origin, "run", "tol", sc.run.tol);
        sc.run.qtol = get_number(r, origin, "run", "qtol", sc.run.qtol);
        sc.run.max_bounces = static_cast<int>(get_number(r, origin, "run", "max_bounces",
                                                         double(sc.run.max_bounces)));
        sc.run.samples = static_cast<int>(get_number(r, origin, "run", "samples",
                                                     double(sc.run.samples)));
    }

    if (doc.contains("checks")) {
        const auto& c = doc.at("checks");
        if (!c.is_object()) fail(origin, "checks", "expected an object");
        reject_unknown(c, origin, "checks", {"drift", "per_bounce"});
        if (c.contains("drift"))
            sc.checks.drift = parse_bounds(c.at("drift"), origin, "checks.drift",
                                           {"E_target", "E_kep", "C", "A1", "D", "E_sph"});
        if (c.contains("per_bounce"))
            sc.checks.per_bounce = parse_bounds(c.at("per_bounce"), origin, "checks.per_bounce",
                                                {"D", "E_kep", "E_target"});
    }

    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned())
            fail(origin, "seed", "expected a non-negative integer");
        sc.seed = doc.at("seed").get<std::uint64_t>();
    }

    // Semantic validation.
    try {
        sc.params.validate();
    } catch (const std::exception& ex) {
        fail(origin, "params", ex.what());
    }
    if (!(sc.run.tol >= 1e-14 && sc.run.tol <= 1e-4))
        fail(origin, "run.tol", "integrator tolerance outside [1e-14, 1e-4]");
    if (!(sc.run.qtol >= 1e-14 && sc.run.qtol <= 1e-6))
        fail(origin, "run.qtol", "quadrature tolerance outside [1e-14, 1e-6]");
    if (sc.run.max_bounces < 0) fail(origin, "run.max_bounces", "must be non-negative");
    if (sc.run.samples < 2) fail(origin, "run.samples", "need at least 2 output samples");
    try {
        sc.resolved_walls();
    } catch (const std::exception& ex) {
        fail(origin, "walls", ex.what());
    }
    if (sc.system == Which::averaged) {
        if (!(sc.params.m1 > 0.0))
            fail(origin, "params.m1", "averaged system requires m1 > 0 (region R)");
        try {
            const PhaseState flat = native_to_flat_std(sc.initial_state, sc.params);
            (void)state_to_elements(flat, sc.params.m1);
        } catch (const std::exception& ex) {
            fail(origin, "initial_state",
                 std::string("averaged system needs a region-R state (E_kep < 0, C != 0): ") +
                     ex.what());
        }
    }
    return sc;
}

} // namespace

Scenario parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path.string() + ": cannot open scenario file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path.string());
}

Scenario parse_scenario_text(const std::string& text, const std::string& origin) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const std::exception& ex) {
        throw std::runtime_error(origin + ": JSON parse error: " + ex.what());
    }
    return parse_document(doc, origin);
}

std::string emit_scenario(const Scenario& sc) {
    ordered_json doc;
    doc["name"] = sc.name;
    doc["system"] = to_string(sc.system);
    doc["space"] = to_string(sc.params.space.kind);
    doc["params"] = {{"m1", sc.params.m1}, {"m2", sc.params.m2}, {"f", sc.params.f},
                     {"a", sc.params.a}};
    doc["initial_state"] = {{"q", {sc.initial_state.q.x, sc.initial_state.q.y}},
                            {"v", {sc.initial_state.v.x, sc.initial_state.v.y}},
                            {"t", sc.initial_state.t}};
    if (!sc.walls.empty()) {
        ordered_json walls = ordered_json::array();
        for (const WallSpec& ws : sc.walls) {
            ordered_json w;
            w["kind"] = to_string(ws.kind);
            w["s"] = ws.s;
            w["branch"] = ws.branch;
            w["offset"] = {ws.offset.x, ws.offset.y};
            if (ws.arc) w["arc"] = {ws.arc->phi0, ws.arc->phi1};
            walls.push_back(w);
        }
        doc["walls"] = walls;
    }
    doc["run"] = {{"t_end", sc.run.t_end},
                  {"tol", sc.run.tol},
                  {"qtol", sc.run.qtol},
                  {"max_bounces", sc.run.max_bounces},
                  {"samples", sc.run.samples}};
    ordered_json checks;
    if (!sc.checks.drift.empty()) {
        ordered_json drift;
        for (const auto& [k, v] : sc.checks.drift) drift[k] = v;
        checks["drift"] = drift;
    }
    if (!sc.checks.per_bounce.empty()) {
        ordered_json pb;
        for (const auto& [k, v] : sc.checks.per_bounce) pb[k] = v;
        checks["per_bounce"] = pb;
    }
    if (!checks.is_null()) doc["checks"] = checks;
    doc["seed"] = sc.seed;
    return doc.dump(2) + "\n";
}

} // namespace confocal

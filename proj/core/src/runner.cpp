#include "confocal/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

#include "confocal/secular.hpp"
#include "confocal/util.hpp"
#include <json.hpp>

namespace confocal {

using ordered_json = nlohmann::ordered_json;

namespace {

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

constexpr const char* kColumns[] = {"E_target", "E_kep", "C", "A1", "D", "E_sph"};

double column_value(const FirstIntegrals& fi, const std::string& key) {
    if (key == "E_target") return fi.e_target;
    if (key == "E_kep") return fi.e_kep;
    if (key == "C") return fi.C;
    if (key == "A1") return fi.a1();
    if (key == "D") return fi.D;
    if (key == "E_sph") return fi.e_pair;
    throw std::invalid_argument("unknown integral column " + key);
}

struct Row {
    double t;
    PhaseState flat_std;
    FirstIntegrals fi;
};

Row make_row(const PhaseState& native, const SystemSelector& sys) {
    Row row;
    row.t = native.t;
    row.flat_std = native_to_flat_std(native, sys.params);
    row.fi = full_integrals(native, sys);
    return row;
}

std::string csv_header() {
    return "t,xi,eta,vxi,veta,E_target,E_kep,C,A1,D,E_sph,identity_residual\n";
}

void append_csv_row(std::string& csv, const Row& row) {
    const auto& s = row.flat_std;
    const double cols[] = {row.t,      s.q.x,        s.q.y,    s.v.x,    s.v.y,
                           row.fi.e_target, row.fi.e_kep, row.fi.C, row.fi.a1(), row.fi.D,
                           row.fi.e_pair,   row.fi.residual};
    for (std::size_t i = 0; i < std::size(cols); ++i) {
        if (i) csv += ',';
        csv += format_double(cols[i]);
    }
    csv += '\n';
}

// Max |x(t)-x(0)| per integral column over the sampled rows.
std::map<std::string, double> column_drifts(const std::vector<Row>& rows) {
    std::map<std::string, double> out;
    if (rows.empty()) return out;
    for (const char* key : kColumns) {
        const double x0 = column_value(rows.front().fi, key);
        double drift = 0.0;
        for (const Row& r : rows) drift = std::max(drift, std::abs(column_value(r.fi, key) - x0));
        out[key] = drift;
    }
    return out;
}

struct BoundOutcome {
    bool all_pass = true;
    ordered_json detail = ordered_json::object();
};

BoundOutcome apply_drift_bounds(const std::map<std::string, double>& drifts,
                                const std::map<std::string, double>& bounds,
                                const std::vector<Row>& rows) {
    BoundOutcome out;
    for (const auto& [key, bound] : bounds) {
        const double x0 = rows.empty() ? 0.0 : column_value(rows.front().fi, key);
        const double allowed = bound * (1.0 + std::abs(x0));
        const double seen = drifts.count(key) ? drifts.at(key) : 0.0;
        const bool pass = seen <= allowed;
        out.all_pass = out.all_pass && pass;
        out.detail[key] = {{"drift", seen}, {"allowed", allowed}, {"pass", pass}};
    }
    return out;
}

// ---------------------------------------------------------------- SVG plots

struct SvgCanvas {
    double min_x = 1e30, min_y = 1e30, max_x = -1e30, max_y = -1e30;
    std::vector<std::string> body;

    void grow(Vec2 p) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }

    void polyline(const std::vector<Vec2>& pts, const char* stroke, double width) {
        if (pts.size() < 2) return;
        std::string d = "<polyline fill=\"none\" stroke=\"";
        d += stroke;
        d += "\" stroke-width=\"" + format_double(width) + "\" points=\"";
        for (const Vec2& p : pts) {
            grow(p);
            d += format_double(p.x) + "," + format_double(-p.y) + " ";
        }
        d += "\"/>";
        body.push_back(d);
    }

    void dot(Vec2 p, const char* fill, double r) {
        grow(p);
        body.push_back("<circle cx=\"" + format_double(p.x) + "\" cy=\"" + format_double(-p.y) +
                       "\" r=\"" + format_double(r) + "\" fill=\"" + std::string(fill) + "\"/>");
    }

    std::string render() const {
        const double pad = 0.05 * std::max(max_x - min_x, max_y - min_y) + 1e-6;
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_double(min_x - pad)
            << " " << format_double(-max_y - pad) << " " << format_double(max_x - min_x + 2 * pad)
            << " " << format_double(max_y - min_y + 2 * pad) << "\">\n";
        for (const auto& e : body) out << e << "\n";
        out << "</svg>\n";
        return out.str();
    }
};

// Sample points of the wall zero set by radial bisection about the conic
// center; enough for a static picture on any of the three charts.
std::vector<std::vector<Vec2>> wall_outline(const Wall& wall, Space space, double r_max) {
    const Vec2 center = 0.5 * (wall.focus1 + wall.focus2);
    std::vector<std::vector<Vec2>> groups(1);
    const int n = 720;
    for (int i = 0; i <= n; ++i) {
        const double phi = 2.0 * std::numbers::pi * i / n;
        const Vec2 dir{std::cos(phi), std::sin(phi)};
        auto value = [&](double r) { return wall_value(wall, center + r * dir, space); };
        double lo = 1e-6, hi = r_max;
        double flo = value(lo);
        bool found = false;
        const int scan = 64;
        for (int j = 1; j <= scan; ++j) {
            const double r = lo + (hi - lo) * j / scan;
            const double f = value(r);
            if ((flo < 0) != (f < 0)) {
                double a = lo + (hi - lo) * (j - 1) / scan, b = r;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (a + b);
                    ((value(mid) < 0) == (flo < 0) ? a : b) = mid;
                }
                const Vec2 p = center + 0.5 * (a + b) * dir;
                if (wall.arc) {
                    const double ang = std::atan2(p.y - center.y, p.x - center.x);
                    auto wrap = [](double x) {
                        x = std::fmod(x, 2.0 * std::numbers::pi);
                        return x < 0 ? x + 2.0 * std::numbers::pi : x;
                    };
                    if (wrap(ang - wall.arc->phi0) > wrap(wall.arc->phi1 - wall.arc->phi0)) break;
                }
                groups.back().push_back(p);
                found = true;
                break;
            }
            flo = f;
        }
        if (!found && !groups.back().empty()) groups.emplace_back();
    }
    return groups;
}

void write_svg(const std::filesystem::path& path, const std::vector<Row>& rows,
               const std::vector<Wall>& walls, const SystemSelector& sys) {
    SvgCanvas canvas;
    std::vector<Vec2> traj;
    traj.reserve(rows.size());
    double extent = 0.0;
    for (const Row& r : rows) {
        const Vec2 q = sys.space().curved() ? unstandardize(r.flat_std, sys.params.a,
                                                            sys.params.beta()).q
                                            : r.flat_std.q;
        traj.push_back(q);
        extent = std::max(extent, q.norm());
    }
    for (const Wall& w : walls)
        for (const auto& group : wall_outline(w, sys.space(), std::max(4.0, 3.0 * extent)))
            canvas.polyline(group, "#777777", 0.004 * std::max(1.0, extent));
    canvas.polyline(traj, "#1f77b4", 0.003 * std::max(1.0, extent));
    for (const Vec2& c : native_chart_centers(sys)) canvas.dot(c, "#d62728", 0.01 * std::max(1.0, extent));
    atomic_write(path, canvas.render());
}

int exit_for_flow(FlowStatus status, bool checks_pass) {
    switch (status) {
        case FlowStatus::ok:
            return checks_pass ? kExitOk : kExitCheckFailed;
        case FlowStatus::singularity_stop:
        case FlowStatus::chart_domain_stop:
        case FlowStatus::step_underflow:
        case FlowStatus::max_steps:
            return kExitEarlyStop;
    }
    return kExitEarlyStop;
}

} // namespace

int run_simulate(const Scenario& sc, const RunOptions& options) {
    const SystemSelector sys = sc.selector();
    IntegrateOptions opts;
    opts.tol = sc.run.tol;
    opts.track_invariant = false;

    const Trajectory traj = integrate(sys, sc.initial_state, sc.initial_state.t + sc.run.t_end, opts);

    std::vector<Row> rows;
    rows.reserve(static_cast<std::size_t>(sc.run.samples));
    const double t0 = traj.t_begin(), t1 = traj.t_end();
    for (int i = 0; i < sc.run.samples; ++i) {
        const double t = t0 + (t1 - t0) * i / (sc.run.samples - 1);
        rows.push_back(make_row(traj.at(t), sys));
    }

    std::string csv = csv_header();
    for (const Row& r : rows) append_csv_row(csv, r);
    atomic_write(options.out_dir / "trajectory.csv", csv);

    const auto drifts = column_drifts(rows);
    const BoundOutcome outcome = apply_drift_bounds(drifts, sc.checks.drift, rows);

    ordered_json summary;
    summary["name"] = sc.name;
    summary["command"] = "simulate";
    summary["status"] = to_string(traj.status);
    summary["t_covered"] = t1 - t0;
    summary["steps"] = traj.stats.steps;
    summary["rejected_steps"] = traj.stats.rejected;
    ordered_json drift_json;
    for (const char* key : kColumns) drift_json[key] = drifts.at(key);
    summary["max_drift"] = drift_json;
    summary["checks"] = outcome.detail;
    summary["passed"] = outcome.all_pass && traj.status == FlowStatus::ok;
    const int exit_code = exit_for_flow(traj.status, outcome.all_pass);
    summary["exit"] = exit_code;
    atomic_write(options.out_dir / "summary.json", summary.dump(2) + "\n");

    if (options.svg) write_svg(*options.svg, rows, {}, sys);
    return exit_code;
}

int run_billiard(const Scenario& sc, const RunOptions& options) {
    if (sc.walls.empty())
        throw std::runtime_error(sc.name + ": billiard scenario needs at least one wall");
    const SystemSelector sys = sc.selector();
    const std::vector<Wall> walls = sc.resolved_walls();
    IntegrateOptions opts;
    opts.tol = sc.run.tol;
    opts.track_invariant = false;

    const BilliardResult res = confocal::run_billiard(
        sys, walls, sc.initial_state, sc.initial_state.t + sc.run.t_end, sc.run.max_bounces, opts);

    std::vector<Row> rows;
    rows.reserve(static_cast<std::size_t>(sc.run.samples));
    const Trajectory& traj = res.trajectory;
    const double t0 = traj.t_begin(), t1 = traj.t_end();
    for (int i = 0; i < sc.run.samples; ++i) {
        const double t = t0 + (t1 - t0) * i / (sc.run.samples - 1);
        rows.push_back(make_row(traj.at(t), sys));
    }
    std::string csv = csv_header();
    for (const Row& r : rows) append_csv_row(csv, r);
    atomic_write(options.out_dir / "trajectory.csv", csv);

    std::string bcsv = "bounce,t,xi,eta,wall,graze";
    for (const char* key : kColumns) {
        bcsv += std::string(",") + key + "_pre," + key + "_post,d" + key;
    }
    bcsv += "\n";
    std::map<std::string, double> worst_delta;
    double worst_target_jump = 0.0;
    for (std::size_t i = 0; i < res.bounces.size(); ++i) {
        const BounceRecord& b = res.bounces[i];
        const PhaseState flat_std =
            native_to_flat_std({b.point, b.v_pre, b.t}, sys.params);
        bcsv += std::to_string(i) + "," + format_double(b.t) + "," + format_double(flat_std.q.x) +
                "," + format_double(flat_std.q.y) + "," + std::to_string(b.wall_index) + "," +
                (b.graze ? "1" : "0");
        for (const char* key : kColumns) {
            const double pre = column_value(b.pre, key);
            const double post = column_value(b.post, key);
            bcsv += "," + format_double(pre) + "," + format_double(post) + "," +
                    format_double(post - pre);
            if (!b.graze)
                worst_delta[key] = std::max(worst_delta[key], std::abs(post - pre));
        }
        if (!b.graze)
            worst_target_jump = std::max(worst_target_jump,
                                         std::abs(b.post.e_target - b.pre.e_target));
        bcsv += "\n";
    }
    atomic_write(options.out_dir / "bounces.csv", bcsv);

    bool bounce_pass = true;
    ordered_json bounce_checks = ordered_json::object();
    for (const auto& [key, bound] : sc.checks.per_bounce) {
        const double seen = worst_delta.count(key) ? worst_delta.at(key) : 0.0;
        double scale = 1.0;
        if (!res.bounces.empty()) scale = 1.0 + std::abs(column_value(res.bounces.front().pre, key));
        const bool pass = seen <= bound * scale;
        bounce_pass = bounce_pass && pass;
        bounce_checks[key] = {{"max_delta", seen}, {"allowed", bound * scale}, {"pass", pass}};
    }
    const auto drifts = column_drifts(rows);
    const BoundOutcome drift_outcome = apply_drift_bounds(drifts, sc.checks.drift, rows);

    ordered_json summary;
    summary["name"] = sc.name;
    summary["command"] = "billiard";
    summary["status"] = to_string(res.status);
    summary["bounces"] = res.bounces.size();
    summary["reflections"] = res.reflections();
    summary["t_covered"] = t1 - t0;
    summary["steps"] = res.trajectory.stats.steps;
    ordered_json drift_json;
    for (const char* key : kColumns) drift_json[key] = drifts.at(key);
    summary["max_drift"] = drift_json;
    summary["per_bounce_checks"] = bounce_checks;
    summary["drift_checks"] = drift_outcome.detail;
    summary["max_E_target_jump"] = worst_target_jump;

    int exit_code = kExitOk;
    if (res.status == BilliardStatus::focus_degeneracy ||
        res.status == BilliardStatus::corner_degeneracy)
        exit_code = kExitDegeneracy;
    else if (res.status != BilliardStatus::ok)
        exit_code = kExitEarlyStop;
    else if (!bounce_pass || !drift_outcome.all_pass)
        exit_code = kExitCheckFailed;
    summary["passed"] = exit_code == kExitOk;
    summary["exit"] = exit_code;
    atomic_write(options.out_dir / "summary.json", summary.dump(2) + "\n");

    if (options.svg) write_svg(*options.svg, rows, walls, sys);
    return exit_code;
}

// ------------------------------------------------------------------- checks

namespace {

struct CheckReport {
    ordered_json lines = ordered_json::array();
    bool pass = true;

    void add(const std::string& label, double value, double threshold) {
        const bool ok = value <= threshold;
        pass = pass && ok;
        lines.push_back({{"check", label}, {"value", value}, {"threshold", threshold},
                         {"pass", ok}});
        std::printf("[%s] %-52s %.3e (<= %.1e)\n", ok ? "PASS" : "FAIL", label.c_str(), value,
                    threshold);
    }
};

ModelParams random_params(SplitMix64& rng, SpaceKind kind) {
    ModelParams p;
    p.space = Space{kind};
    p.m1 = rng.uniform(0.2, 2.0);
    p.m2 = rng.uniform(-1.0, 1.0);
    p.f = rng.uniform(-0.5, 0.5);
    p.a = kind == SpaceKind::hyperbolic ? rng.uniform(0.05, 0.9) : rng.uniform(0.05, 2.0);
    return p;
}

// Raw-chart state clear of the centers (and inside the hyperbolic disk).
PhaseState random_raw_state(SplitMix64& rng, const ModelParams& p) {
    while (true) {
        const PhaseState s{{rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)},
                           {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)},
                           0.0};
        if (p.space.kind == SpaceKind::hyperbolic && s.q.norm2() > 0.85) continue;
        if ((s.q - Vec2{0.0, p.a}).norm() < 0.05) continue;
        if ((s.q - Vec2{0.0, -p.a}).norm() < 0.05) continue;
        return s;
    }
}

int check_identities(int samples, std::uint64_t seed, CheckReport& report) {
    for (SpaceKind kind :
         {SpaceKind::euclidean, SpaceKind::spherical, SpaceKind::hyperbolic}) {
        SplitMix64 rng(seed ^ (0x51ul + static_cast<unsigned>(kind)));
        double worst = 0.0;
        for (int i = 0; i < samples; ++i) {
            const ModelParams p = random_params(rng, kind);
            const PhaseState raw = random_raw_state(rng, p);
            for (Which w : {Which::two_center, Which::lagrange}) {
                const double res = identity_residual(raw, p, w);
                const double scale = 1.0 + std::abs(energy_curved_chart(raw, p, w));
                worst = std::max(worst, std::abs(res) / scale);
            }
        }
        report.add(std::string("factorization residual, ") + to_string(kind), worst, 1e-10);
    }
    return report.pass ? kExitOk : kExitCheckFailed;
}

int check_brackets(int samples, std::uint64_t seed, CheckReport& report) {
    const Space flat = Space::euclidean();

    // Flat-chart pairs.
    {
        SplitMix64 rng(seed ^ 0xb1ul);
        double trivial = 0.0, rot = 0.0, pair_tc = 0.0, pair_dk = 0.0, pair_lagr = 0.0;
        for (int i = 0; i < samples; ++i) {
            const ModelParams p = random_params(rng, SpaceKind::euclidean);
            PhaseState s = random_raw_state(rng, p);
            s = standardize(s, p.a, p.beta());
            if (s.q.norm() < 0.1) continue;

            auto e_eucl = [&p](const PhaseState& z) { return energy_euclidean(z, p, Which::two_center); };
            auto e_lagr = [&p](const PhaseState& z) { return energy_euclidean(z, p, Which::lagrange); };
            auto e_kep = [&p](const PhaseState& z) { return energy_euclidean(z, p, Which::kepler); };
            auto ang = [&p](const PhaseState& z) { return kepler_first_integrals(z, p.m1).C; };
            auto e_pair2 = [&p](const PhaseState& z) {
                return energy_curved_chart(unstandardize(z, p.a, p.beta()), p, Which::two_center);
            };
            auto e_pairl = [&p](const PhaseState& z) {
                return energy_curved_chart(unstandardize(z, p.a, p.beta()), p, Which::lagrange);
            };
            auto dk = [&p](const PhaseState& z) {
                return integral_D(z, p) + remainder_K(z, p, Which::two_center);
            };

            trivial = std::max(trivial, std::abs(poisson_bracket_fd(e_eucl, e_eucl, s, flat)));
            rot = std::max(rot, std::abs(poisson_bracket_fd(e_kep, ang, s, flat)));
            pair_tc = std::max(pair_tc, std::abs(poisson_bracket_fd(e_eucl, e_pair2, s, flat)));
            pair_lagr = std::max(pair_lagr, std::abs(poisson_bracket_fd(e_lagr, e_pairl, s, flat)));
            pair_dk = std::max(pair_dk, std::abs(poisson_bracket_fd(e_eucl, dk, s, flat)));
        }
        report.add("{E_eucl, E_eucl} (antisymmetry)", trivial, 1e-12);
        report.add("{E_kep, C} (rotational symmetry)", rot, 1e-8);
        report.add("{E_eucl, E_pair} flat two-center", pair_tc, 1e-6);
        report.add("{E_lagrange, E_pair} flat", pair_lagr, 1e-6);
        report.add("{E_eucl, D + K} flat", pair_dk, 1e-6);
    }

    // Curved-chart pairs: native energy against the transported D + K.
    for (SpaceKind kind : {SpaceKind::spherical, SpaceKind::hyperbolic}) {
        SplitMix64 rng(seed ^ (0xc7ul + static_cast<unsigned>(kind)));
        double worst = 0.0;
        for (int i = 0; i < samples; ++i) {
            const ModelParams p = random_params(rng, kind);
            const PhaseState raw = random_raw_state(rng, p);
            const PhaseState native = to_curved_clock(raw, p.space);
            const double kappa = p.kappa_pair();
            auto e_native = [&p](const PhaseState& z) {
                return energy_curved_native(z, p, Which::lagrange);
            };
            auto dk = [&p, kappa](const PhaseState& z) {
                const PhaseState fs = matched_flat_state(z, p);
                return kappa * integral_D(fs, p) + remainder_K(fs, p, Which::lagrange);
            };
            worst = std::max(worst, std::abs(poisson_bracket_fd(e_native, dk, native, p.space)));
        }
        report.add(std::string("{E_native, kappa D + K} ") + to_string(kind), worst, 1e-6);
    }
    return report.pass ? kExitOk : kExitCheckFailed;
}

int check_projective(int samples, CheckReport& report) {
    const int test_points = std::max(samples, 2048);
    for (SpaceKind kind : {SpaceKind::spherical, SpaceKind::hyperbolic}) {
        for (Which which : {Which::two_center, Which::lagrange}) {
            ModelParams p{1.0, 0.1, which == Which::lagrange ? 0.05 : 0.0,
                          kind == SpaceKind::hyperbolic ? 0.45 : 0.7, Space{kind}};
            const PhaseState f0 = elements_to_state(
                {0.65, 0.25 * std::cos(0.9), 0.25 * std::sin(0.9), 0.0, 1.0}, 1.0, 0.4);

            SystemSelector curved;
            curved.which = which;
            curved.params = p;
            SystemSelector twin = curved;
            twin.params.space = Space::euclidean();
            const double h = p.h();
            twin.params.a = h / std::sqrt(1.0 - h * h);

            IntegrateOptions opts;
            opts.tol = 1e-12;
            opts.track_invariant = false;
            const double t_flat = 6.0;
            const Trajectory ft = integrate(twin, f0, t_flat, opts);

            double t_curved = 0.0;
            const int n_sync = 50000;
            double prev_t = 0.0;
            for (int i = 1; i <= n_sync; ++i) {
                const double t = t_flat * i / n_sync;
                const PhaseState s = ft.at(0.5 * (prev_t + t));
                t_curved += (t - prev_t) / time_rescale(p.space, unstandardize(s, p.a, p.beta()).q);
                prev_t = t;
            }
            const Trajectory ct = integrate(curved, matched_curved_state(f0, p), 0.999 * t_curved, opts);

            std::vector<Vec2> poly;
            poly.reserve(16 * ft.segments.size() + 1);
            for (const auto& seg : ft.segments)
                for (int j = 0; j < 16; ++j) {
                    const auto y = seg.eval(seg.t0 + seg.h * j / 16.0);
                    poly.push_back({y[0], y[1]});
                }
            poly.push_back(ft.samples.back().q);

            double haus = 0.0;
            for (int i = 0; i <= test_points; ++i) {
                const Vec2 q = matched_flat_state(ct.at(ct.t_end() * i / test_points), p).q;
                double dmin = 1e30;
                for (std::size_t j = 0; j + 1 < poly.size(); ++j) {
                    const Vec2 a = poly[j], b = poly[j + 1];
                    const Vec2 ab = b - a;
                    const double tt =
                        std::clamp(dot(q - a, ab) / std::max(1e-30, ab.norm2()), 0.0, 1.0);
                    dmin = std::min(dmin, (q - (a + tt * ab)).norm2());
                }
                haus = std::max(haus, std::sqrt(dmin));
            }
            report.add(std::string("projected orbit distance, ") + to_string(kind) + " " +
                           to_string(which),
                       haus, 1e-6);
        }
    }
    return report.pass ? kExitOk : kExitCheckFailed;
}

int check_quadrature(CheckReport& report) {
    std::printf("node-doubling convergence of the secondary average\n");
    std::printf("(apocenter aimed 0.08 inside the second center so the rule is not\n");
    std::printf("already converged at the smallest grid):\n");
    for (double ecc : {0.3, 0.6, 0.9}) {
        AveragedSystem avg;
        avg.params = {1.0, 0.1, 0.0, 1.0, Space::euclidean()};
        avg.qtol = 1e-14;
        avg.node_cap = 1 << 16;
        const double apo = 2.0 * avg.params.h() - 0.08;
        const OrbitElements el{std::sqrt(apo / (1.0 + ecc)), 0.0, ecc, 0.0, 1.0};

        AveragedSystem fixed = avg;
        fixed.fixed_nodes = 1 << 14;
        const double ref = averaged_secondary_potential(el, fixed);
        double err64 = 0.0, err128 = 0.0;
        std::printf("  e = %.2f:", ecc);
        for (int n : {32, 64, 128, 256}) {
            fixed.fixed_nodes = n;
            const double err = std::abs(averaged_secondary_potential(el, fixed) - ref);
            if (n == 64) err64 = err;
            if (n == 128) err128 = err;
            std::printf("  N=%d err=%.2e", n, err);
        }
        std::printf("\n");
        const bool saturated = err64 <= 1e-14 * (1.0 + std::abs(ref));
        const double reduction = err128 > 0.0 ? err64 / err128 : 1e30;
        // stored as the reciprocal so that "value <= threshold" reads
        // naturally: err128 <= err64 / 10 (or the rule already hit rounding).
        report.add("doubling 64->128 error ratio (1/reduction), e=" + format_double(ecc),
                   saturated ? 0.0 : 1.0 / reduction, 0.1);
    }
    return report.pass ? kExitOk : kExitCheckFailed;
}

} // namespace

std::optional<CheckSuite> check_suite_from_name(std::string_view name) {
    if (name == "identities") return CheckSuite::identities;
    if (name == "brackets") return CheckSuite::brackets;
    if (name == "projective") return CheckSuite::projective;
    if (name == "quadrature") return CheckSuite::quadrature;
    return std::nullopt;
}

const char* to_string(CheckSuite suite) {
    switch (suite) {
        case CheckSuite::identities: return "identities";
        case CheckSuite::brackets:   return "brackets";
        case CheckSuite::projective: return "projective";
        case CheckSuite::quadrature: return "quadrature";
    }
    return "?";
}

int run_check(CheckSuite suite, int samples, std::uint64_t seed, const RunOptions& options) {
    CheckReport report;
    int code = kExitOk;
    switch (suite) {
        case CheckSuite::identities: code = check_identities(samples, seed, report); break;
        case CheckSuite::brackets:   code = check_brackets(samples, seed, report); break;
        case CheckSuite::projective: code = check_projective(samples, report); break;
        case CheckSuite::quadrature: code = check_quadrature(report); break;
    }
    ordered_json doc;
    doc["suite"] = to_string(suite);
    doc["samples"] = samples;
    doc["seed"] = seed;
    doc["results"] = report.lines;
    doc["passed"] = report.pass;
    atomic_write(options.out_dir / (std::string("check_") + to_string(suite) + ".json"),
                 doc.dump(2) + "\n");
    return code;
}

int run_sweep(const std::filesystem::path& batch_path, const RunOptions& options, int jobs) {
    std::ifstream in(batch_path);
    if (!in) throw std::runtime_error(batch_path.string() + ": cannot open batch file");
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const std::exception& ex) {
        throw std::runtime_error(batch_path.string() + ": JSON parse error: " + ex.what());
    }
    if (!doc.is_object() || !doc.contains("scenarios") || !doc.at("scenarios").is_array())
        throw std::runtime_error(batch_path.string() + ": expected {\"scenarios\": [paths...]}");

    std::vector<Scenario> scenarios;
    for (const auto& entry : doc.at("scenarios")) {
        if (!entry.is_string())
            throw std::runtime_error(batch_path.string() + ": scenario entries must be paths");
        std::filesystem::path p = entry.get<std::string>();
        if (p.is_relative()) p = batch_path.parent_path() / p;
        scenarios.push_back(parse_scenario(p));
    }

    std::vector<int> exits(scenarios.size(), kExitOk);
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= scenarios.size()) return;
            const Scenario& sc = scenarios[i];
            RunOptions local = options;
            local.out_dir = options.out_dir / sc.name;
            local.svg.reset();
            try {
                exits[i] = sc.walls.empty() ? run_simulate(sc, local) : confocal::run_billiard(sc, local);
            } catch (const std::exception&) {
                exits[i] = kExitConfig;
            }
        }
    };
    jobs = std::max(1, jobs);
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    ordered_json summary;
    summary["batch"] = batch_path.string();
    ordered_json list = ordered_json::array();
    int worst = kExitOk;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        list.push_back({{"name", scenarios[i].name}, {"exit", exits[i]}});
        worst = std::max(worst, exits[i]);
        std::printf("[%s] %s (exit %d)\n", exits[i] == 0 ? "PASS" : "FAIL",
                    scenarios[i].name.c_str(), exits[i]);
    }
    summary["scenarios"] = list;
    summary["exit"] = worst;
    atomic_write(options.out_dir / "sweep_summary.json", summary.dump(2) + "\n");
    return worst;
}

} // namespace confocal

#include "confocal/secular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "confocal/flow.hpp"
#include "confocal/rk_dopri5.hpp"

namespace confocal {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// The perturbation always carries the m2 and Hooke terms as given.
constexpr Which kPerturbation = Which::lagrange;

} // namespace

double OrbitElements::period(double m1) const { return kTwoPi / mean_motion(m1); }

AveragedSystem make_averaged(const SystemSelector& sys) {
    AveragedSystem avg;
    avg.params = sys.params;
    avg.qtol = sys.qtol;
    avg.node_cap = sys.node_cap;
    avg.fixed_nodes = sys.fixed_nodes;
    return avg;
}

double solve_kepler(double ell, double e) {
    if (!(e >= 0.0) || e >= 1.0 - 1e-12)
        throw std::invalid_argument("solve_kepler: eccentricity outside [0, 1)");
    const double lr = std::remainder(ell, kTwoPi);
    if (lr == 0.0) return ell - lr;
    double lo = lr - e, hi = lr + e;
    double x = e > 0.1 ? lr + 0.85 * e * (std::sin(lr) >= 0.0 ? 1.0 : -1.0) : lr;
    for (int it = 0; it < 100; ++it) {
        const double f = x - e * std::sin(x) - lr;
        if (std::abs(f) <= 1e-15 * (1.0 + std::abs(lr)) + 1e-16) return x + (ell - lr);
        (f > 0.0 ? hi : lo) = x;
        const double xn = x - f / (1.0 - e * std::cos(x));
        x = (xn > lo && xn < hi) ? xn : 0.5 * (lo + hi);
    }
    throw QuadratureError("solve_kepler: no convergence (internal error)");
}

namespace {

struct EllipseGeom {
    double a, e, se; // semi-major axis, eccentricity, sqrt(1-e^2)
    Vec2 ph, qh;     // pericenter direction and in-plane normal (oriented)
};

EllipseGeom ellipse_geom(const OrbitElements& el, double m1) {
    EllipseGeom g;
    g.a = el.sma(m1);
    g.e = el.ecc();
    g.se = std::sqrt(std::max(0.0, 1.0 - g.e * g.e));
    const double peri = std::atan2(el.h, el.k);
    g.ph = {std::cos(peri), std::sin(peri)};
    g.qh = el.sgn * Vec2{-g.ph.y, g.ph.x};
    return g;
}

Vec2 point_at_eccentric(const EllipseGeom& g, double ecc_anom) {
    const double ce = std::cos(ecc_anom), se = std::sin(ecc_anom);
    return g.a * (ce - g.e) * g.ph + g.a * g.se * se * g.qh;
}

} // namespace

OrbitElements state_to_elements(const PhaseState& s, double m1) {
    const double r = s.q.norm();
    const KeplerIntegrals ki = kepler_first_integrals(s, m1);
    const double e_kep = 0.5 * s.v.norm2() - m1 / r;
    if (!(e_kep < 0.0))
        throw RegionError("state outside region R: E_kep >= 0 (orbit is not an ellipse)");
    if (ki.C == 0.0)
        throw RegionError("state outside region R: zero angular momentum (collision orbit)");

    OrbitElements el;
    el.L = m1 / std::sqrt(-2.0 * e_kep);
    el.k = ki.A.x / m1;
    el.h = ki.A.y / m1;
    el.sgn = ki.C > 0.0 ? 1.0 : -1.0;
    const double e = el.ecc();
    if (e >= 1.0 - 1e-12)
        throw RegionError("state outside region R: eccentricity at the parabolic limit");

    const EllipseGeom g = ellipse_geom(el, m1);
    const double cosE = dot(s.q, g.ph) / g.a + e;
    const double sinE = g.se > 0.0 ? dot(s.q, g.qh) / (g.a * g.se) : 0.0;
    const double ea = std::atan2(sinE, cosE);
    el.ell = ea - e * std::sin(ea);
    return el;
}

PhaseState elements_to_state(const OrbitElements& el, double m1, double ell) {
    if (!(el.L > 0.0)) throw std::invalid_argument("elements_to_state: L must be positive");
    const double e = el.ecc();
    if (e >= 1.0 - 1e-12)
        throw RegionError("elements_to_state: eccentricity at the parabolic limit");
    const EllipseGeom g = ellipse_geom(el, m1);
    const double ea = solve_kepler(ell, e);
    const double ce = std::cos(ea), se = std::sin(ea);
    const Vec2 q = g.a * (ce - e) * g.ph + g.a * g.se * se * g.qh;
    const double eadot = el.mean_motion(m1) / (1.0 - e * ce);
    const Vec2 v = g.a * eadot * (-se * g.ph + g.se * ce * g.qh);
    return {q, v, 0.0};
}

namespace {

// Extremum of a smooth function over the orbit: coarse scan in eccentric
// anomaly plus golden-section refinement around the best node.
template <class Fn>
double orbit_scan_min(const Fn& f, int samples = 256) {
    double best = f(0.0);
    double best_x = 0.0;
    for (int j = 1; j < samples; ++j) {
        const double x = kTwoPi * j / samples;
        const double v = f(x);
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = best_x - kTwoPi / samples, hi = best_x + kTwoPi / samples;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo); f1 = f(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo); f2 = f(x2);
        }
    }
    return std::min({best, f1, f2});
}

} // namespace

double orbit_min_secondary_distance(const OrbitElements& el, const ModelParams& p) {
    const EllipseGeom g = ellipse_geom(el, p.m1);
    const Vec2 c2 = p.second_center_std();
    return orbit_scan_min([&](double ea) { return (point_at_eccentric(g, ea) - c2).norm(); });
}

double orbit_max_raw_radius(const OrbitElements& el, const ModelParams& p) {
    const EllipseGeom g = ellipse_geom(el, p.m1);
    const double a = p.a, beta = p.beta();
    return -orbit_scan_min([&](double ea) {
        const PhaseState raw = unstandardize({point_at_eccentric(g, ea), {}, 0.0}, a, beta);
        return -raw.q.norm();
    });
}

void require_orbit_clear(const OrbitElements& el, const AveragedSystem& avg) {
    if (avg.params.m2 != 0.0 && orbit_min_secondary_distance(el, avg.params) < kExclusionRadius)
        throw RegionError("orbit enters the exclusion ball around the second center");
    if (avg.params.space.kind == SpaceKind::hyperbolic &&
        orbit_max_raw_radius(el, avg.params) >= 1.0 - kChartDomainMargin)
        throw RegionError("orbit leaves the hyperbolic chart disk");
}

namespace {

// Accumulated trapezoid sums of the weighted integrand over uniform mean
// anomaly; flat spaces have unit weight, curved ones the dwell-time weight of
// the projective clock change.
struct QuadSums {
    double vw = 0.0;
    double w = 0.0;
    int nodes = 0;
    double value() const { return vw / w; }
};

struct AvgContext {
    const ModelParams& p;
    EllipseGeom geom;
    bool curved;
};

// The mean-anomaly average is computed in the eccentric anomaly,
//   (1/2pi) Int V dl = (1/2pi) Int V(q(E)) (1 - e cos E) dE,
// which keeps the integrand analytic at high eccentricity and needs no
// Kepler solves at the nodes.
void add_node(QuadSums& sums, const AvgContext& ctx, double ce, double se) {
    const EllipseGeom& g = ctx.geom;
    const Vec2 qs = g.a * (ce - g.e) * g.ph + g.a * g.se * se * g.qh;
    double w = 1.0 - g.e * ce;
    double v;
    if (!ctx.curved) {
        v = flat_secondary_potential(qs, ctx.p, kPerturbation);
    } else {
        const Vec2 qraw = unstandardize({qs, {}, 0.0}, ctx.p.a, ctx.p.beta()).q;
        w /= time_rescale(ctx.p.space, qraw);
        v = curved_secondary_potential(qraw, ctx.p, kPerturbation);
    }
    sums.vw += w * v;
    sums.w += w;
    ++sums.nodes;
}

// One pass over an equispaced eccentric-anomaly grid, sin/cos by rotation
// recurrence with periodic refresh.
void add_pass(QuadSums& sums, const AvgContext& ctx, double ea0, double dea, int count) {
    const double cd = std::cos(dea), sd = std::sin(dea);
    double ce = std::cos(ea0), se = std::sin(ea0);
    for (int j = 0; j < count; ++j) {
        if (j > 0 && j % 64 == 0) {
            ce = std::cos(ea0 + dea * j);
            se = std::sin(ea0 + dea * j);
        }
        add_node(sums, ctx, ce, se);
        const double cn = ce * cd - se * sd;
        se = se * cd + ce * sd;
        ce = cn;
    }
}

QuadSums rule_sums(const AvgContext& ctx, int n) {
    QuadSums sums;
    add_pass(sums, ctx, 0.0, kTwoPi / n, n);
    return sums;
}

// Doubling reuses the previous rule: the refined rule's new nodes are the
// odd multiples of the halved spacing.
void double_rule(QuadSums& sums, const AvgContext& ctx) {
    const int n = sums.nodes;
    add_pass(sums, ctx, kTwoPi / (2 * n), kTwoPi / n, n);
}

struct QuadResult {
    double value;
    int nodes;
};

QuadResult adaptive_average(const OrbitElements& el, const AveragedSystem& avg) {
    const AvgContext ctx{avg.params, ellipse_geom(el, avg.params.m1), avg.params.space.curved()};
    QuadSums sums = rule_sums(ctx, 16);
    double prev = sums.value();
    while (sums.nodes < avg.node_cap) {
        double_rule(sums, ctx);
        const double cur = sums.value();
        if (std::abs(cur - prev) <= avg.qtol * std::max(1.0, std::abs(cur)))
            return {cur, sums.nodes};
        prev = cur;
    }
    throw QuadratureError("averaged_secondary_potential: node cap exceeded");
}

double fixed_average(const OrbitElements& el, const AveragedSystem& avg, int n) {
    const AvgContext ctx{avg.params, ellipse_geom(el, avg.params.m1), avg.params.space.curved()};
    return rule_sums(ctx, n).value();
}

} // namespace

double averaged_secondary_potential(const OrbitElements& el, const AveragedSystem& avg) {
    if (avg.params.m2 == 0.0 && avg.params.f == 0.0) return 0.0;
    if (avg.fixed_nodes > 0) return fixed_average(el, avg, avg.fixed_nodes);
    require_orbit_clear(el, avg);
    return adaptive_average(el, avg).value;
}

int converged_node_count(const PhaseState& native, const AveragedSystem& avg) {
    const OrbitElements el = state_to_elements(native_to_flat_std(native, avg.params), avg.params.m1);
    if (avg.params.m2 == 0.0 && avg.params.f == 0.0) return 16;
    require_orbit_clear(el, avg);
    return adaptive_average(el, avg).nodes;
}

double averaged_hamiltonian(const PhaseState& native, const AveragedSystem& avg) {
    const ModelParams& p = avg.params;
    const PhaseState std_state = native_to_flat_std(native, p);
    const OrbitElements el = state_to_elements(std_state, p.m1);
    const double kinetic_part = p.space.curved() ? energy_curved_native(native, p, Which::kepler)
                                                 : energy_euclidean(std_state, p, Which::kepler);
    const double v2 = avg.orbit_average ? orbit_average_secondary(native, avg)
                                        : averaged_secondary_potential(el, avg);
    return kinetic_part + v2;
}

namespace {

template <class Fn>
double richardson_partial(const Fn& f, double step) {
    auto diff = [&](double hh) { return (f(hh) - f(-hh)) / (2.0 * hh); };
    return (4.0 * diff(step / 2.0) - diff(step)) / 3.0;
}

AveragedSystem locked_copy(const PhaseState& native, const AveragedSystem& avg) {
    AveragedSystem loc = avg;
    if (loc.fixed_nodes == 0) {
        const OrbitElements el =
            state_to_elements(native_to_flat_std(native, loc.params), loc.params.m1);
        require_orbit_clear(el, loc);
        if (loc.params.m2 == 0.0 && loc.params.f == 0.0) {
            loc.fixed_nodes = 16;
        } else {
            loc.fixed_nodes = std::min(2 * adaptive_average(el, loc).nodes, loc.node_cap);
        }
    }
    return loc;
}

} // namespace

PhaseDeriv averaged_vector_field(const PhaseState& native, const AveragedSystem& avg) {
    const AveragedSystem loc = locked_copy(native, avg);
    const ModelParams& p = loc.params;
    const Space sp = p.space;

    // Unperturbed part analytically; only the averaged secondary goes through
    // finite differences.
    SystemSelector kep;
    kep.which = Which::kepler;
    kep.params = p;
    const PhaseDeriv base = vector_field(kep, native);
    if (p.m2 == 0.0 && p.f == 0.0) return base;

    const Vec2 q = native.q;
    const Vec2 mom = chart_metric(sp, q) * native.v;
    auto vbar = [&](double z0, double z1, double z2, double z3) {
        const Vec2 qq{z0, z1};
        const PhaseState st{qq, chart_metric_inverse(sp, qq) * Vec2{z2, z3}, native.t};
        const OrbitElements el = state_to_elements(native_to_flat_std(st, p), p.m1);
        return averaged_secondary_potential(el, loc);
    };
    const double step = std::max(1e-5, 1e-5 * std::sqrt(q.norm2() + mom.norm2()));
    double grad[4];
    for (int i = 0; i < 4; ++i) {
        grad[i] = richardson_partial(
            [&](double hh) {
                double z[4] = {q.x, q.y, mom.x, mom.y};
                z[i] += hh;
                return vbar(z[0], z[1], z[2], z[3]);
            },
            step);
    }
    const Vec2 dq2{grad[2], grad[3]};  // dVbar/dp
    const Vec2 dp2{-grad[0], -grad[1]}; // -dVbar/dq

    if (!sp.curved()) return {base.dq + dq2, base.dv + dp2};

    const auto dginv = chart_metric_inverse_derivative(sp, q);
    const Vec2 du2 = (dginv[0] * mom) * dq2.x + (dginv[1] * mom) * dq2.y +
                     chart_metric_inverse(sp, q) * dp2;
    return {base.dq + dq2, base.dv + du2};
}

SecularRates reduced_secular_rates(const OrbitElements& el, const AveragedSystem& avg) {
    const double e = el.ecc();
    if (e < 1e-8)
        throw std::invalid_argument("reduced_secular_rates: eccentricity too small");
    AveragedSystem loc = avg;
    if (loc.fixed_nodes == 0) {
        require_orbit_clear(el, loc);
        loc.fixed_nodes = std::min(2 * adaptive_average(el, loc).nodes, loc.node_cap);
    }

    const double L = el.L;
    const double G = el.angular_momentum();
    const double g = std::atan2(el.h, el.k);

    auto avg_potential = [&](double gg, double gl) {
        const double ee = std::sqrt(std::max(0.0, 1.0 - gg * gg / (L * L)));
        OrbitElements e2 = el;
        e2.sgn = gg >= 0.0 ? 1.0 : -1.0;
        e2.k = ee * std::cos(gl);
        e2.h = ee * std::sin(gl);
        return averaged_secondary_potential(e2, loc);
    };

    const double step = 1e-5 * std::max(1.0, std::abs(G));
    const double dv_dg = richardson_partial([&](double hh) { return avg_potential(G, g + hh); }, step);
    const double dv_dG = richardson_partial([&](double hh) { return avg_potential(G + hh, g); }, step);

    const double g_dot = dv_dG;   // dg/dt =  dV/dG
    const double G_dot = -dv_dg;  // dG/dt = -dV/dg
    const double e_dot = -G * G_dot / (e * L * L);
    return {e_dot * std::cos(g) - e * std::sin(g) * g_dot,
            e_dot * std::sin(g) + e * std::cos(g) * g_dot};
}

double closed_orbit_period(const PhaseState& native, const ModelParams& p, double tol) {
    const PhaseState std_state = native_to_flat_std(native, p);
    const OrbitElements el = state_to_elements(std_state, p.m1);
    const double t_flat = el.period(p.m1);
    if (!p.space.curved()) return t_flat;

    // The dwell-time weight gives a sharp period estimate; first return is
    // then located on a section through the initial phase point.
    const EllipseGeom geom = ellipse_geom(el, p.m1);
    double wsum = 0.0;
    const int nw = 512;
    for (int j = 0; j < nw; ++j) {
        const double ea = kTwoPi * j / nw;
        const Vec2 qraw = unstandardize({point_at_eccentric(geom, ea), {}, 0.0}, p.a, p.beta()).q;
        wsum += (1.0 - geom.e * std::cos(ea)) / time_rescale(p.space, qraw);
    }
    const double t_guess = t_flat * wsum / nw;

    SystemSelector kep;
    kep.which = Which::kepler;
    kep.params = p;
    IntegrateOptions opts;
    opts.tol = tol;
    PhaseState start = native;
    start.t = 0.0;
    const Trajectory traj = integrate(kep, start, 1.25 * t_guess, opts);
    if (traj.status != FlowStatus::ok)
        throw QuadratureError("closed_orbit_period: unperturbed flow stopped early");

    const PhaseDeriv f0 = vector_field(kep, start);
    auto section = [&](double t) {
        const PhaseState s = traj.at(t);
        return dot(s.q - start.q, f0.dq) + dot(s.v - start.v, f0.dv);
    };
    // Bracket the sign change of the section function around the estimate.
    double lo = 0.85 * t_guess, hi = 1.15 * t_guess;
    const int scan = 64;
    double t_lo = lo, t_hi = hi;
    bool found = false;
    double prev_t = lo, prev_s = section(lo);
    for (int j = 1; j <= scan; ++j) {
        const double t = lo + (hi - lo) * j / scan;
        const double s = section(t);
        if (prev_s < 0.0 && s >= 0.0) {
            t_lo = prev_t;
            t_hi = t;
            found = true;
            break;
        }
        prev_t = t;
        prev_s = s;
    }
    if (!found) throw QuadratureError("closed_orbit_period: period detection failure");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (t_lo + t_hi);
        (section(mid) < 0.0 ? t_lo : t_hi) = mid;
        if (t_hi - t_lo < 1e-13 * t_guess) break;
    }
    const double period = 0.5 * (t_lo + t_hi);

    const PhaseState ret = traj.at(period);
    const double scale = 1.0 + std::sqrt(start.q.norm2() + start.v.norm2());
    const double dist = std::sqrt((ret.q - start.q).norm2() + (ret.v - start.v).norm2());
    if (dist > 1e-9 * scale * 10.0 + 100.0 * tol)
        throw QuadratureError("closed_orbit_period: period detection failure (no phase return)");
    return period;
}

double orbit_average_secondary(const PhaseState& native, const AveragedSystem& avg) {
    const ModelParams& p = avg.params;
    if (p.m2 == 0.0 && p.f == 0.0) return 0.0;
    const double period = closed_orbit_period(native, p, avg.flow_tol);

    SystemSelector kep;
    kep.which = Which::kepler;
    kep.params = p;
    const bool curved = p.space.curved();

    using Arr5 = std::array<double, 5>;
    Dopri5<5> core(
        [&](double t, const Arr5& y, Arr5& dy) {
            const PhaseState s{{y[0], y[1]}, {y[2], y[3]}, t};
            const PhaseDeriv d = vector_field(kep, s);
            dy[0] = d.dq.x;
            dy[1] = d.dq.y;
            dy[2] = d.dv.x;
            dy[3] = d.dv.y;
            dy[4] = curved ? curved_secondary_potential(s.q, p, kPerturbation)
                           : flat_secondary_potential(s.q, p, kPerturbation);
        },
        avg.flow_tol);
    core.reset(0.0, {native.q.x, native.q.y, native.v.x, native.v.y, 0.0});
    while (true) {
        const StepResult res = core.advance(period);
        if (res == StepResult::reached_limit) break;
        if (res == StepResult::step_underflow)
            throw QuadratureError("orbit_average_secondary: step underflow");
    }
    return core.y()[4] / period;
}

} // namespace confocal

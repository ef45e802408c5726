#include "confocal/billiard.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace confocal {

const char* to_string(WallKind kind) {
    switch (kind) {
        case WallKind::ellipse:          return "ellipse";
        case WallKind::hyperbola_branch: return "hyperbola_branch";
        case WallKind::focal_line:       return "focal_line";
    }
    return "?";
}

const char* to_string(BilliardStatus status) {
    switch (status) {
        case BilliardStatus::ok:                return "ok";
        case BilliardStatus::singularity_stop:  return "singularity_stop";
        case BilliardStatus::chart_domain_stop: return "chart_domain_stop";
        case BilliardStatus::step_underflow:    return "step_underflow";
        case BilliardStatus::max_steps:         return "max_steps";
        case BilliardStatus::focus_degeneracy:  return "focus_degeneracy";
        case BilliardStatus::corner_degeneracy: return "corner_degeneracy";
    }
    return "?";
}

int BilliardResult::reflections() const {
    int n = 0;
    for (const auto& b : bounces)
        if (!b.graze) ++n;
    return n;
}

Wall Wall::confocal(WallKind kind, double s, int branch, const ModelParams& params, Vec2 offset) {
    Wall w;
    w.kind = kind;
    w.s = s;
    w.branch = branch;
    if (params.space.curved()) {
        w.focus1 = Vec2{0.0, params.a} + offset;
        w.focus2 = Vec2{0.0, -params.a} + offset;
    } else {
        w.focus1 = offset;
        w.focus2 = params.second_center_std() + offset;
    }
    return w;
}

void Wall::validate(Space space) const {
    const double c = 0.5 * geodesic_distance(space, focus1, focus2);
    switch (kind) {
        case WallKind::ellipse:
            if (!(s > c)) throw std::invalid_argument("Wall: ellipse requires s > c");
            if (space.kind == SpaceKind::spherical && !(s < std::numbers::pi - c))
                throw std::invalid_argument("Wall: spherical ellipse requires s < pi - c");
            break;
        case WallKind::hyperbola_branch:
            if (!(s > 0.0 && s < c))
                throw std::invalid_argument("Wall: hyperbola requires 0 < s < c");
            if (branch != 1 && branch != -1)
                throw std::invalid_argument("Wall: branch must be +1 or -1");
            break;
        case WallKind::focal_line:
            break;
    }
    if (arc && !(std::abs(arc->phi0) <= 2 * std::numbers::pi && std::abs(arc->phi1) <= 2 * std::numbers::pi))
        throw std::invalid_argument("Wall: arc angles must lie in [-2pi, 2pi]");
}

double wall_value(const Wall& wall, Vec2 point, Space space) {
    const double r1 = geodesic_distance(space, point, wall.focus1);
    const double r2 = geodesic_distance(space, point, wall.focus2);
    switch (wall.kind) {
        case WallKind::ellipse:          return r1 + r2 - 2.0 * wall.s;
        case WallKind::hyperbola_branch: return wall.branch * (r1 - r2) - 2.0 * wall.s;
        case WallKind::focal_line:       return r1 - r2;
    }
    return 0.0;
}

namespace {

// Chart gradient of the geodesic distance to a fixed chart point.
Vec2 distance_gradient(Space space, Vec2 q, Vec2 focus) {
    if (!space.curved()) {
        const Vec2 d = q - focus;
        const double r = d.norm();
        if (r < 1e-14) throw std::invalid_argument("wall gradient at a focus");
        return d / r;
    }
    const double kappa = space.curvature();
    const Vec3 z = lift_to_surface({focus, {}, 0.0}, space).point;
    const double w = 1.0 + kappa * q.norm2();
    const double s = std::sqrt(w);
    // c(q) = <P(q), Z> in the ambient form; theta = acos(c) or acosh(-c).
    const Vec3 pq{q.x / s, q.y / s, -1.0 / s};
    const double cval = ambient_dot(space, pq, z);
    const Vec2 dc = Vec2{z.x / s, z.y / s} - (kappa * cval / w) * q;
    if (space.kind == SpaceKind::spherical) {
        const double s2 = std::max(1e-28, 1.0 - cval * cval);
        return (-1.0 / std::sqrt(s2)) * dc;
    }
    const double s2 = std::max(1e-28, cval * cval - 1.0);
    return (-1.0 / std::sqrt(s2)) * dc;
}

} // namespace

Vec2 wall_gradient(const Wall& wall, Vec2 point, Space space) {
    const Vec2 g1 = distance_gradient(space, point, wall.focus1);
    const Vec2 g2 = distance_gradient(space, point, wall.focus2);
    switch (wall.kind) {
        case WallKind::ellipse:          return g1 + g2;
        case WallKind::hyperbola_branch: return wall.branch * (g1 - g2);
        case WallKind::focal_line:       return g1 - g2;
    }
    return {};
}

Vec2 wall_unit_normal(const Wall& wall, Vec2 point, Space space) {
    const Vec2 grad = wall_gradient(wall, point, space);
    const Mat2 ginv = chart_metric_inverse(space, point);
    const Vec2 n = ginv * grad;
    const double len2 = dot(grad, n);
    if (len2 < 1e-24) throw std::invalid_argument("wall_unit_normal: degenerate gradient");
    return n / std::sqrt(len2);
}

namespace {

bool near_arc_corner(const Wall& wall, Vec2 point) {
    if (!wall.arc) return false;
    const Vec2 center = 0.5 * (wall.focus1 + wall.focus2);
    const double rad = (point - center).norm();
    const double phi = std::atan2(point.y - center.y, point.x - center.x);
    auto angdiff = [](double a, double b) {
        double d = std::remainder(a - b, 2.0 * std::numbers::pi);
        return std::abs(d);
    };
    const double margin = kFocusDegeneracyRadius / std::max(rad, 1e-6);
    return angdiff(phi, wall.arc->phi0) < margin || angdiff(phi, wall.arc->phi1) < margin;
}

bool in_arc_window(const Wall& wall, Vec2 point) {
    if (!wall.arc) return true;
    const Vec2 center = 0.5 * (wall.focus1 + wall.focus2);
    const double phi = std::atan2(point.y - center.y, point.x - center.x);
    auto wrap = [](double x) {
        const double tp = 2.0 * std::numbers::pi;
        x = std::fmod(x, tp);
        return x < 0.0 ? x + tp : x;
    };
    return wrap(phi - wall.arc->phi0) <= wrap(wall.arc->phi1 - wall.arc->phi0);
}

Vec2 segment_point(const DenseSegment<4>& seg, double t) {
    const auto y = seg.eval(t);
    return {y[0], y[1]};
}

} // namespace

std::optional<Impact> find_impact(const DenseSegment<4>& seg, const std::vector<Wall>& walls,
                                  Space space, double t_min) {
    constexpr int kKnots = 8;
    std::optional<Impact> best;
    const double t0 = seg.t0, t1 = seg.t1();

    for (std::size_t wi = 0; wi < walls.size(); ++wi) {
        const Wall& wall = walls[wi];
        double ta = t0;
        double fa = wall_value(wall, segment_point(seg, ta), space);
        for (int j = 1; j <= kKnots; ++j) {
            const double tb = t0 + (t1 - t0) * j / kKnots;
            const double fb = wall_value(wall, segment_point(seg, tb), space);
            if ((fa < 0.0) != (fb < 0.0)) {
                double lo = ta, hi = tb;
                for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = wall_value(wall, segment_point(seg, mid), space);
                    if ((fa < 0.0) != (fm < 0.0))
                        hi = mid;
                    else
                        lo = mid;
                }
                const double tc = 0.5 * (lo + hi);
                const Vec2 pc = segment_point(seg, tc);
                // arc-boundary grazes stay events so the caller can flag the
                // corner degeneracy
                if (tc > t_min && (in_arc_window(wall, pc) || near_arc_corner(wall, pc)) &&
                    (!best || tc < best->t))
                    best = Impact{tc, pc, static_cast<int>(wi)};
            }
            ta = tb;
            fa = fb;
        }
    }
    return best;
}

namespace {

BilliardStatus from_flow(FlowStatus status) {
    switch (status) {
        case FlowStatus::ok:                return BilliardStatus::ok;
        case FlowStatus::singularity_stop:  return BilliardStatus::singularity_stop;
        case FlowStatus::chart_domain_stop: return BilliardStatus::chart_domain_stop;
        case FlowStatus::step_underflow:    return BilliardStatus::step_underflow;
        case FlowStatus::max_steps:         return BilliardStatus::max_steps;
    }
    return BilliardStatus::ok;
}

} // namespace

BilliardResult run_billiard(const SystemSelector& sys, const std::vector<Wall>& walls,
                            const PhaseState& state, double t_end, int max_bounces,
                            const IntegrateOptions& opts) {
    sys.validate();
    for (const Wall& w : walls) w.validate(sys.space());
    for (const Wall& w : walls)
        if (std::abs(wall_value(w, state.q, sys.space())) < 1e-12)
            throw std::invalid_argument("run_billiard: initial state lies on a wall");

    BilliardResult out;
    out.trajectory.samples.push_back(state);

    FlowStepper stepper(sys, opts);
    stepper.reset(state);
    const Space space = sys.space();
    double t_guard = state.t; // crossings at or before this time are stale

    while (true) {
        const FlowStatus fs = stepper.step(t_end);
        if (fs != FlowStatus::ok) {
            // Record what we have; a singular or underflowed step still
            // produced its accepted prefix.
            out.status = from_flow(fs);
            break;
        }
        DenseSegment<4> seg = stepper.segment();

        if (const auto hit = find_impact(seg, walls, space, t_guard)) {
            const Wall& wall = walls[static_cast<std::size_t>(hit->wall_index)];
            const auto y = seg.eval(hit->t);
            PhaseState si{{y[0], y[1]}, {y[2], y[3]}, hit->t};

            if ((si.q - wall.focus1).norm() < kFocusDegeneracyRadius ||
                (si.q - wall.focus2).norm() < kFocusDegeneracyRadius) {
                out.status = BilliardStatus::focus_degeneracy;
                break;
            }
            if (near_arc_corner(wall, si.q)) {
                out.status = BilliardStatus::corner_degeneracy;
                break;
            }

            seg.h = hit->t - seg.t0; // truncate the segment at the impact
            out.trajectory.segments.push_back(seg);

            const Vec2 nhat = wall_unit_normal(wall, si.q, space);
            const Mat2 g = chart_metric(space, si.q);
            const double vn = dot(si.v, g * nhat);

            BounceRecord rec;
            rec.t = si.t;
            rec.point = si.q;
            rec.v_pre = si.v;
            rec.wall_index = hit->wall_index;
            rec.pre = full_integrals(si, sys);

            PhaseState post = si;
            if (std::abs(vn) < kGrazeTolerance) {
                rec.graze = true; // tangential pass-through, no reflection
            } else {
                post = reflect_vector(si, nhat, space);
            }
            rec.v_post = post.v;
            rec.post = rec.graze ? rec.pre : full_integrals(post, sys);
            out.bounces.push_back(rec);

            // Restart just off the wall along the outgoing direction. A graze
            // leaves the wall value near zero, so blank a short time window
            // instead of relying on the sign moving away.
            const double vnorm = post.v.norm();
            if (vnorm > 0.0) post.q += (kReflectionNudge / vnorm) * post.v;
            t_guard = rec.graze ? post.t + 1e-9 : post.t;
            stepper.reset(post);
            out.trajectory.samples.push_back(post);

            if (static_cast<int>(out.bounces.size()) >= max_bounces) break;
            continue;
        }

        out.trajectory.segments.push_back(seg);
        out.trajectory.samples.push_back(stepper.state());
        if (stepper.done(t_end)) break;
    }

    const TrajectoryStats st = stepper.stats();
    out.trajectory.stats.steps += st.steps;
    out.trajectory.stats.rejected += st.rejected;
    out.trajectory.stats.rhs_evals += st.rhs_evals;
    switch (out.status) {
        case BilliardStatus::singularity_stop:  out.trajectory.status = FlowStatus::singularity_stop; break;
        case BilliardStatus::chart_domain_stop: out.trajectory.status = FlowStatus::chart_domain_stop; break;
        case BilliardStatus::step_underflow:    out.trajectory.status = FlowStatus::step_underflow; break;
        case BilliardStatus::max_steps:         out.trajectory.status = FlowStatus::max_steps; break;
        default:                                out.trajectory.status = FlowStatus::ok; break;
    }
    return out;
}

} // namespace confocal

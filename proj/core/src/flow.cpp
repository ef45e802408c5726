#include "confocal/flow.hpp"

#include <algorithm>
#include <cmath>

#include "confocal/secular.hpp"

namespace confocal {

const char* to_string(FlowStatus status) {
    switch (status) {
        case FlowStatus::ok:                return "ok";
        case FlowStatus::singularity_stop:  return "singularity_stop";
        case FlowStatus::chart_domain_stop: return "chart_domain_stop";
        case FlowStatus::step_underflow:    return "step_underflow";
        case FlowStatus::max_steps:         return "max_steps";
    }
    return "?";
}

void SystemSelector::validate() const {
    params.validate();
    if (which == Which::averaged) {
        if (!(params.m1 > 0.0))
            throw std::invalid_argument("averaged system requires m1 > 0");
        if (!(qtol >= 1e-14 && qtol <= 1e-6))
            throw std::invalid_argument("averaged system: qtol outside [1e-14, 1e-6]");
        if (node_cap < 8)
            throw std::invalid_argument("averaged system: node cap too small");
    }
}

std::vector<Vec2> native_chart_centers(const SystemSelector& sys) {
    const ModelParams& p = sys.params;
    std::vector<Vec2> centers;
    if (p.space.curved()) {
        centers.push_back({0.0, p.a});
        if (smooth_base(sys.which) != Which::kepler && p.m2 != 0.0) centers.push_back({0.0, -p.a});
    } else {
        centers.push_back({0.0, 0.0});
        if (smooth_base(sys.which) != Which::kepler && p.m2 != 0.0)
            centers.push_back(p.second_center_std());
    }
    return centers;
}

PhaseDeriv vector_field(const SystemSelector& sys, const PhaseState& state) {
    const ModelParams& p = sys.params;
    if (sys.which == Which::averaged)
        return averaged_vector_field(state, make_averaged(sys));

    if (!p.space.curved())
        return {state.v, -flat_potential_gradient(state.q, p, sys.which)};

    // Natural system on the curved chart: the metric-term contributions of the
    // gnomonic charts collapse to an acceleration parallel to the velocity.
    const double kappa = p.space.curvature();
    const double w = 1.0 + kappa * state.q.norm2();
    const Vec2 grad_v = curved_potential_gradient(state.q, p, sys.which);
    const Mat2 ginv = chart_metric_inverse(p.space, state.q);
    const Vec2 acc = (2.0 * kappa * dot(state.q, state.v) / w) * state.v - ginv * grad_v;
    return {state.v, acc};
}

double governing_energy(const PhaseState& state, const SystemSelector& sys) {
    const ModelParams& p = sys.params;
    if (sys.which == Which::averaged) return averaged_hamiltonian(state, make_averaged(sys));
    if (p.space.curved()) return energy_curved_native(state, p, sys.which);
    return energy_euclidean(state, p, sys.which);
}

FirstIntegrals full_integrals(const PhaseState& state, const SystemSelector& sys) {
    FirstIntegrals out = evaluate_integrals(state, sys.params, sys.which);
    if (sys.which == Which::averaged)
        out.e_target = averaged_hamiltonian(state, make_averaged(sys));
    return out;
}

namespace {

using Arr4 = std::array<double, 4>;

Arr4 pack(const PhaseState& s) { return {s.q.x, s.q.y, s.v.x, s.v.y}; }
PhaseState unpack(const Arr4& y, double t) { return {{y[0], y[1]}, {y[2], y[3]}, t}; }

Dopri5<4>::Rhs make_rhs(const SystemSelector& sys) {
    return [sys](double t, const Arr4& y, Arr4& dy) {
        const PhaseDeriv d = vector_field(sys, unpack(y, t));
        dy = {d.dq.x, d.dq.y, d.dv.x, d.dv.y};
    };
}

SystemSelector lock_quadrature(const SystemSelector& sys, const PhaseState& state) {
    SystemSelector run = sys;
    if (run.which == Which::averaged && run.fixed_nodes == 0) {
        // Freeze one quadrature rule for the entire run so the integrated
        // Hamiltonian is smooth across steps; doubled for margin.
        const int n = converged_node_count(state, make_averaged(run));
        run.fixed_nodes = std::min(2 * n, run.node_cap);
    }
    return run;
}

// Distance checks shared by integrate() and FlowStepper.
FlowStatus classify_state(const SystemSelector& sys, const PhaseState& s, double sing_radius) {
    if (sys.space().curved() && !chart_domain_ok(sys.space(), s.q))
        return FlowStatus::chart_domain_stop;
    for (const Vec2& c : native_chart_centers(sys))
        if ((s.q - c).norm() < sing_radius) return FlowStatus::singularity_stop;
    return FlowStatus::ok;
}

double cheap_invariant(const SystemSelector& sys, const PhaseState& s) {
    if (sys.which == Which::averaged)
        return energy_euclidean(native_to_flat_std(s, sys.params), sys.params, Which::kepler);
    return governing_energy(s, sys);
}

} // namespace

Trajectory integrate(const SystemSelector& sys, const PhaseState& state, double t_end,
                     const IntegrateOptions& opts) {
    sys.validate();
    const SystemSelector run = lock_quadrature(sys, state);

    Trajectory traj;
    traj.samples.push_back(state);

    Dopri5<4> core(make_rhs(run), opts.tol);
    core.reset(state.t, pack(state));

    double inv0 = 0.0;
    if (opts.track_invariant) inv0 = cheap_invariant(run, state);

    if (FlowStatus st = classify_state(run, state, opts.singularity_radius); st != FlowStatus::ok) {
        traj.status = st;
        return traj;
    }

    while (true) {
        StepResult res;
        try {
            res = core.advance(t_end);
        } catch (const SingularityError&) {
            traj.status = FlowStatus::singularity_stop;
            break;
        } catch (const ChartDomainError&) {
            traj.status = FlowStatus::chart_domain_stop;
            break;
        } catch (const RegionError&) {
            traj.status = FlowStatus::singularity_stop;
            break;
        }
        if (res == StepResult::step_underflow) {
            traj.status = FlowStatus::step_underflow;
            break;
        }

        const PhaseState s = unpack(core.y(), core.t());
        traj.samples.push_back(s);
        if (opts.record_segments) traj.segments.push_back(core.segment());
        if (opts.track_invariant) {
            const double drift = std::abs(cheap_invariant(run, s) - inv0);
            traj.stats.max_invariant_drift = std::max(traj.stats.max_invariant_drift, drift);
        }

        if (FlowStatus st = classify_state(run, s, opts.singularity_radius); st != FlowStatus::ok) {
            traj.status = st;
            break;
        }
        if (res == StepResult::reached_limit) break;
        if (core.steps() >= opts.max_steps) {
            traj.status = FlowStatus::max_steps;
            break;
        }
    }

    traj.stats.steps = core.steps();
    traj.stats.rejected = core.rejected();
    traj.stats.rhs_evals = core.rhs_evals();
    return traj;
}

PhaseState Trajectory::at(double t) const {
    const double lo = std::min(t_begin(), t_end());
    const double hi = std::max(t_begin(), t_end());
    t = std::clamp(t, lo, hi);
    if (segments.empty()) return samples.back();

    const bool forward = segments.front().h > 0;
    auto it = std::lower_bound(segments.begin(), segments.end(), t,
                               [forward](const DenseSegment<4>& seg, double tv) {
                                   return forward ? seg.t1() < tv : seg.t1() > tv;
                               });
    if (it == segments.end()) --it;
    const auto y = it->eval(t);
    return {{y[0], y[1]}, {y[2], y[3]}, t};
}

FlowStepper::FlowStepper(SystemSelector sys, IntegrateOptions opts)
    : sys_(std::move(sys)), opts_(opts), core_(make_rhs(sys_), opts.tol) {
    sys_.validate();
}

void FlowStepper::reset(const PhaseState& state) {
    if (sys_.which == Which::averaged && sys_.fixed_nodes == 0) {
        sys_ = lock_quadrature(sys_, state);
        core_ = Dopri5<4>(make_rhs(sys_), opts_.tol);
    }
    core_.reset(state.t, pack(state));
}

FlowStatus FlowStepper::step(double t_limit) {
    StepResult res;
    try {
        res = core_.advance(t_limit);
    } catch (const SingularityError&) {
        return FlowStatus::singularity_stop;
    } catch (const ChartDomainError&) {
        return FlowStatus::chart_domain_stop;
    } catch (const RegionError&) {
        return FlowStatus::singularity_stop;
    }
    if (res == StepResult::step_underflow) return FlowStatus::step_underflow;
    return classify_state(sys_, state(), opts_.singularity_radius);
}

PhaseState FlowStepper::state() const { return unpack(core_.y(), core_.t()); }

TrajectoryStats FlowStepper::stats() const {
    TrajectoryStats st;
    st.steps = core_.steps();
    st.rejected = core_.rejected();
    st.rhs_evals = core_.rhs_evals();
    return st;
}

namespace {

// Partial derivative by central differences with one Richardson level.
template <class Fn>
double fd_partial(const Fn& f, int coord, double step) {
    auto diff = [&](double h) { return (f(coord, h) - f(coord, -h)) / (2.0 * h); };
    const double d1 = diff(step);
    const double d2 = diff(step / 2.0);
    return (4.0 * d2 - d1) / 3.0;
}

} // namespace

double poisson_bracket_fd(const PhaseFunction& f, const PhaseFunction& g, const PhaseState& state,
                          Space space, double step) {
    const Vec2 q = state.q;
    const Vec2 p = chart_metric(space, q) * state.v;
    if (step <= 0.0) {
        const double scale = std::sqrt(q.norm2() + p.norm2());
        step = std::max(1e-5, 1e-5 * scale);
    }

    // Canonical evaluation: displace (q, p), map momentum back through the
    // metric at the displaced point.
    auto canonical = [&](const PhaseFunction& fn) {
        return [&space, fn, q, p, t = state.t](int coord, double h) {
            double z[4] = {q.x, q.y, p.x, p.y};
            z[coord] += h;
            const Vec2 qq{z[0], z[1]};
            const Vec2 pp{z[2], z[3]};
            return fn({qq, chart_metric_inverse(space, qq) * pp, t});
        };
    };

    const auto fc = canonical(f);
    const auto gc = canonical(g);
    double bracket = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double df_dq = fd_partial(fc, i, step);
        const double df_dp = fd_partial(fc, i + 2, step);
        const double dg_dq = fd_partial(gc, i, step);
        const double dg_dp = fd_partial(gc, i + 2, step);
        bracket += df_dq * dg_dp - df_dp * dg_dq;
    }
    return bracket;
}

} // namespace confocal

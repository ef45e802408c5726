#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "confocal/model.hpp"
#include "confocal/rk_dopri5.hpp"

namespace confocal {

// Governing system of a run. State convention per space:
//   euclidean  -- standardized chart, flat-clock velocities;
//   curved     -- raw chart, native (curved-clock) velocities.
struct SystemSelector {
    Which which = Which::kepler;
    ModelParams params;

    // Averaged-flow quadrature controls (ignored by the smooth systems).
    double qtol = 1e-12;
    int node_cap = 1 << 14;
    int fixed_nodes = 0; // 0 = converge per run, then lock

    Space space() const { return params.space; }
    void validate() const;
};

enum class FlowStatus { ok, singularity_stop, chart_domain_stop, step_underflow, max_steps };

const char* to_string(FlowStatus status);

struct TrajectoryStats {
    long steps = 0;
    long rejected = 0;
    long rhs_evals = 0;
    // Governing-energy drift for smooth systems; Kepler-energy drift for the
    // averaged ones (their own energy needs a quadrature per sample).
    double max_invariant_drift = 0.0;
};

struct Trajectory {
    std::vector<PhaseState> samples;
    std::vector<DenseSegment<4>> segments;
    FlowStatus status = FlowStatus::ok;
    TrajectoryStats stats;

    double t_begin() const { return samples.front().t; }
    double t_end() const { return samples.back().t; }
    const PhaseState& back() const { return samples.back(); }

    // Dense evaluation; t clamped into the covered span.
    PhaseState at(double t) const;
};

struct IntegrateOptions {
    double tol = 1e-10;
    long max_steps = 50'000'000;
    double singularity_radius = 1e-6;
    bool record_segments = true;
    bool track_invariant = true;
};

PhaseDeriv vector_field(const SystemSelector& sys, const PhaseState& state);

Trajectory integrate(const SystemSelector& sys, const PhaseState& state, double t_end,
                     const IntegrateOptions& opts = {});

// Energy of the governing system (averaged systems included).
double governing_energy(const PhaseState& state, const SystemSelector& sys);

// First integrals with e_target filled for any system kind.
FirstIntegrals full_integrals(const PhaseState& state, const SystemSelector& sys);

// Centers of the active potential terms in the system's native chart.
std::vector<Vec2> native_chart_centers(const SystemSelector& sys);

// Incremental stepping with dense output, for event loops.
class FlowStepper {
public:
    FlowStepper(SystemSelector sys, IntegrateOptions opts);

    void reset(const PhaseState& state);
    // One accepted step toward t_limit; FlowStatus::ok while running.
    FlowStatus step(double t_limit);
    bool done(double t_limit) const { return state().t == t_limit; }

    PhaseState state() const;
    const DenseSegment<4>& segment() const { return core_.segment(); }
    const SystemSelector& system() const { return sys_; }
    TrajectoryStats stats() const;

private:
    SystemSelector sys_;
    IntegrateOptions opts_;
    Dopri5<4> core_;
};

// Finite-difference Poisson bracket of two phase-space scalars at a state of
// the given space, computed in canonical coordinates obtained by the Legendre
// transform of the chart kinetic metric. Central differences with one
// Richardson level; step <= 0 picks the default max(1e-5, 1e-5*|state|).
using PhaseFunction = std::function<double(const PhaseState&)>;
double poisson_bracket_fd(const PhaseFunction& f, const PhaseFunction& g, const PhaseState& state,
                          Space space, double step = 0.0);

} // namespace confocal

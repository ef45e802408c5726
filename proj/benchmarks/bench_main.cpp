#include <benchmark/benchmark.h>

#include <cmath>

#include "confocal/billiard.hpp"
#include "confocal/flow.hpp"
#include "confocal/secular.hpp"

using namespace confocal;

namespace {

SystemSelector two_center_system(SpaceKind kind) {
    SystemSelector sys;
    sys.which = Which::two_center;
    sys.params = {1.0, 0.4, 0.0, kind == SpaceKind::hyperbolic ? 0.4 : 1.0, Space{kind}};
    return sys;
}

void BM_VectorFieldFlat(benchmark::State& state) {
    const SystemSelector sys = two_center_system(SpaceKind::euclidean);
    const PhaseState s{{0.8, 0.3}, {-0.2, 0.9}, 0.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(vector_field(sys, s));
    }
}
BENCHMARK(BM_VectorFieldFlat);

void BM_VectorFieldCurved(benchmark::State& state) {
    const SystemSelector sys = two_center_system(SpaceKind::spherical);
    const PhaseState s{{0.4, 0.3}, {-0.2, 0.9}, 0.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(vector_field(sys, s));
    }
}
BENCHMARK(BM_VectorFieldCurved);

void BM_SolveKepler(benchmark::State& state) {
    double ell = 0.1;
    for (auto _ : state) {
        ell += 0.37;
        if (ell > 6.28) ell -= 6.28;
        benchmark::DoNotOptimize(solve_kepler(ell, 0.65));
    }
}
BENCHMARK(BM_SolveKepler);

void BM_IntegrateKeplerOrbit(benchmark::State& state) {
    SystemSelector sys;
    sys.which = Which::kepler;
    sys.params = {1.0, 0.0, 0.0, 1.0, Space::euclidean()};
    const PhaseState s0 = elements_to_state({1.0, 0.3, 0.1, 0, 1.0}, 1.0, 0.0);
    IntegrateOptions opts;
    opts.tol = 1e-10;
    opts.record_segments = false;
    opts.track_invariant = false;
    for (auto _ : state) {
        benchmark::DoNotOptimize(integrate(sys, s0, 2 * std::numbers::pi, opts));
    }
}
BENCHMARK(BM_IntegrateKeplerOrbit);

void BM_AveragedHamiltonian(benchmark::State& state) {
    AveragedSystem avg;
    avg.params = {1.0, 0.1, 0.0, 1.0,
                  state.range(0) ? Space::spherical() : Space::euclidean()};
    avg.fixed_nodes = 128;
    const PhaseState flat = elements_to_state({1.5, 0.1, 0.2, 0, 1.0}, 1.0, 0.7);
    const PhaseState s = avg.params.space.curved() ? matched_curved_state(flat, avg.params) : flat;
    for (auto _ : state) {
        benchmark::DoNotOptimize(averaged_hamiltonian(s, avg));
    }
}
BENCHMARK(BM_AveragedHamiltonian)->Arg(0)->Arg(1);

void BM_AveragedVectorField(benchmark::State& state) {
    AveragedSystem avg;
    avg.params = {1.0, 0.1, 0.0, 1.0, Space::euclidean()};
    avg.fixed_nodes = 128;
    const PhaseState s = elements_to_state({1.5, 0.1, 0.2, 0, 1.0}, 1.0, 0.7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(averaged_vector_field(s, avg));
    }
}
BENCHMARK(BM_AveragedVectorField);

void BM_PoissonBracket(benchmark::State& state) {
    const ModelParams p{1.0, 0.5, 0.0, 1.0, Space::euclidean()};
    const PhaseState s{{0.8, 0.3}, {-0.2, 0.9}, 0.0};
    auto e_eucl = [&p](const PhaseState& z) { return energy_euclidean(z, p, Which::two_center); };
    auto e_pair = [&p](const PhaseState& z) {
        return energy_curved_chart(unstandardize(z, p.a, p.beta()), p, Which::two_center);
    };
    for (auto _ : state) {
        benchmark::DoNotOptimize(poisson_bracket_fd(e_eucl, e_pair, s, Space::euclidean()));
    }
}
BENCHMARK(BM_PoissonBracket);

void BM_BilliardBounce(benchmark::State& state) {
    SystemSelector sys;
    sys.which = Which::kepler;
    sys.params = {1.0, 0.0, 0.0, 0.9, Space::euclidean()};
    const Wall wall = Wall::confocal(WallKind::focal_line, 0.0, 1, sys.params);
    const PhaseState s0{{0.9, 0.1}, {-0.2, 1.05}, 0};
    IntegrateOptions opts;
    opts.tol = 1e-10;
    opts.record_segments = false;
    opts.track_invariant = false;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_billiard(sys, {wall}, s0, 1e9, 4, opts));
    }
}
BENCHMARK(BM_BilliardBounce);

} // namespace

BENCHMARK_MAIN();

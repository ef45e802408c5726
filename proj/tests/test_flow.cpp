#include <doctest.h>

#include <cmath>

#include "confocal/flow.hpp"
#include "confocal/secular.hpp"
#include "confocal/util.hpp"

using namespace confocal;

TEST_CASE("vector field basics") {
    SystemSelector kep;
    kep.which = Which::kepler;
    kep.params = {1.0, 0.0, 0.0, 1.0, Space::euclidean()};
    const PhaseDeriv circ = vector_field(kep, {{1, 0}, {0, 1}, 0});
    CHECK(circ.dq.x == 0.0);
    CHECK(circ.dq.y == 1.0);
    CHECK(circ.dv.x == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(std::abs(circ.dv.y) < 1e-15);

    SystemSelector free = kep;
    free.params.m1 = 0.0;
    const PhaseDeriv f = vector_field(free, {{0.3, -0.2}, {0.5, 0.4}, 0});
    CHECK(f.dv.x == 0.0);
    CHECK(f.dv.y == 0.0);
}

TEST_CASE("vector field matches energy gradient") {
    SplitMix64 rng(43);
    for (int i = 0; i < 100; ++i) {
        SystemSelector sys;
        sys.which = Which::two_center;
        sys.params = {rng.uniform(0.3, 1.5), rng.uniform(-0.8, 0.8), 0.0, rng.uniform(0.3, 1.5),
                      Space::euclidean()};
        const PhaseState s{{rng.uniform(0.4, 1.2), rng.uniform(0.2, 1.0)},
                           {rng.uniform(-1, 1), rng.uniform(-1, 1)},
                           0.0};
        const PhaseDeriv d = vector_field(sys, s);
        CHECK(d.dq.x == s.v.x);
        CHECK(d.dq.y == s.v.y);
        // central differences with one Richardson level, step 1e-6
        for (int k = 0; k < 2; ++k) {
            const Vec2 e = k == 0 ? Vec2{1, 0} : Vec2{0, 1};
            auto energy_at = [&](double h) {
                PhaseState z = s;
                z.q += h * e;
                return energy_euclidean(z, sys.params, sys.which);
            };
            auto diff = [&](double h) { return (energy_at(h) - energy_at(-h)) / (2 * h); };
            const double grad = (4.0 * diff(5e-7) - diff(1e-6)) / 3.0;
            const double got = k == 0 ? d.dv.x : d.dv.y;
            CHECK(std::abs(got + grad) < 1e-6 * (1.0 + std::abs(grad)));
        }
    }
}

TEST_CASE("curved field matches canonical equations") {
    SplitMix64 rng(47);
    for (int i = 0; i < 60; ++i) {
        const SpaceKind kind = i % 2 ? SpaceKind::spherical : SpaceKind::hyperbolic;
        SystemSelector sys;
        sys.which = Which::lagrange;
        sys.params = {1.0, 0.4, 0.1, kind == SpaceKind::hyperbolic ? 0.4 : 1.0, Space{kind}};
        const PhaseState s{{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)},
                           {rng.uniform(-1, 1), rng.uniform(-1, 1)},
                           0.0};
        if ((s.q - Vec2{0, sys.params.a}).norm() < 0.15) continue;
        if ((s.q - Vec2{0, -sys.params.a}).norm() < 0.15) continue;

        const PhaseDeriv d = vector_field(sys, s);
        CHECK(d.dq.x == s.v.x);

        // d/dt of the native energy along the field must vanish
        const double tau = 1e-6;
        const PhaseState plus{s.q + tau * d.dq, s.v + tau * d.dv, 0};
        const PhaseState minus{s.q - tau * d.dq, s.v - tau * d.dv, 0};
        const double de = (energy_curved_native(plus, sys.params, sys.which) -
                           energy_curved_native(minus, sys.params, sys.which)) /
                          (2 * tau);
        CHECK(std::abs(de) < 1e-7 * (1.0 + std::abs(energy_curved_native(s, sys.params, sys.which))));
    }
}

TEST_CASE("circular orbit returns after one period") {
    SystemSelector sys;
    sys.which = Which::kepler;
    sys.params = {1.0, 0.0, 0.0, 1.0, Space::euclidean()};
    const PhaseState s0{{1, 0}, {0, 1}, 0};
    IntegrateOptions opts;
    opts.tol = 1e-10;
    const Trajectory traj = integrate(sys, s0, 2.0 * std::numbers::pi, opts);
    REQUIRE(traj.status == FlowStatus::ok);
    const PhaseState end = traj.back();
    CHECK((end.q - s0.q).norm() < 1e-8);
    CHECK((end.v - s0.v).norm() < 1e-8);
}

TEST_CASE("dense segments reproduce endpoints") {
    SystemSelector sys;
    sys.which = Which::two_center;
    sys.params = {1.0, 0.3, 0.0, 1.0, Space::euclidean()};
    const PhaseState s0 = elements_to_state({1.7, 0.2, 0.1, 0, 1.0}, 1.0, 0.0);
    IntegrateOptions opts;
    opts.tol = 1e-9;
    const Trajectory traj = integrate(sys, s0, 10.0, opts);
    REQUIRE(traj.segments.size() + 1 == traj.samples.size());
    for (std::size_t i = 0; i < traj.segments.size(); ++i) {
        const auto& seg = traj.segments[i];
        const auto y0 = seg.eval(seg.t0);
        const auto y1 = seg.eval(seg.t1());
        const PhaseState& a = traj.samples[i];
        const PhaseState& b = traj.samples[i + 1];
        CHECK(std::abs(y0[0] - a.q.x) < 1e-10);
        CHECK(std::abs(y0[2] - a.v.x) < 1e-10);
        CHECK(std::abs(y1[1] - b.q.y) < 1e-10);
        CHECK(std::abs(y1[3] - b.v.y) < 1e-10);
    }
}

TEST_CASE("self convergence under tolerance halving") {
    // Loose-tolerance regime: the endpoint error is phase dominated and
    // halving the tolerance gains well over the asymptotic order-5 factor.
    SystemSelector sys;
    sys.which = Which::two_center;
    sys.params = {1.0, 0.3, 0.0, 1.0, Space::euclidean()};
    const PhaseState s0 = elements_to_state({0.75, 0.2, 0.1, 0, 1.0}, 1.0, 0.0);
    const double t_end = 20.0;

    IntegrateOptions ref_opts;
    ref_opts.tol = 1e-13;
    ref_opts.record_segments = false;
    const PhaseState ref = integrate(sys, s0, t_end, ref_opts).back();
    auto err_at = [&](double tol) {
        IntegrateOptions o;
        o.tol = tol;
        o.record_segments = false;
        const PhaseState e = integrate(sys, s0, t_end, o).back();
        return std::sqrt((e.q - ref.q).norm2() + (e.v - ref.v).norm2());
    };
    double prev = err_at(1e-5);
    for (const double tol : {5e-6, 2.5e-6, 1.25e-6}) {
        const double cur = err_at(tol);
        CHECK(prev / cur >= 4.0);
        prev = cur;
    }
}

TEST_CASE("time reversal") {
    for (const double tol : {1e-8, 1e-10}) {
        SystemSelector sys;
        sys.which = Which::two_center;
        sys.params = {1.0, 0.3, 0.0, 1.0, Space::euclidean()};
        const PhaseState s0 = elements_to_state({0.75, 0.15, -0.1, 0, 1.0}, 1.0, 0.3);
        IntegrateOptions opts;
        opts.tol = tol;
        opts.record_segments = false;
        const Trajectory fwd = integrate(sys, s0, 1.0, opts);
        REQUIRE(fwd.status == FlowStatus::ok);
        const Trajectory bwd = integrate(sys, fwd.back(), s0.t, opts);
        REQUIRE(bwd.status == FlowStatus::ok);
        const PhaseState end = bwd.back();
        const double err = std::sqrt((end.q - s0.q).norm2() + (end.v - s0.v).norm2());
        CHECK(err <= 10.0 * tol);
    }
}

TEST_CASE("energy conservation tracks the tolerance") {
    SystemSelector sys;
    sys.which = Which::two_center;
    sys.params = {1.0, 0.4, 0.0, 1.0, Space::euclidean()};
    const PhaseState s0 = elements_to_state({1.7, 0.2, 0.1, 0, 1.0}, 1.0, 0.0);
    IntegrateOptions opts;
    opts.tol = 1e-10;
    const Trajectory traj = integrate(sys, s0, 100.0, opts);
    REQUIRE(traj.status == FlowStatus::ok);
    CHECK(traj.stats.max_invariant_drift <= 100.0 * opts.tol);

    // the paired curved energy is a first integral of this flow
    double e0 = 0.0, drift = 0.0;
    bool first = true;
    for (const PhaseState& s : traj.samples) {
        const double e = evaluate_integrals(s, sys.params, sys.which).e_pair;
        if (first) {
            e0 = e;
            first = false;
        }
        drift = std::max(drift, std::abs(e - e0));
    }
    CHECK(drift / std::abs(e0) <= 1e-7);
}

TEST_CASE("singularity stop flags the trajectory") {
    SystemSelector sys;
    sys.which = Which::kepler;
    sys.params = {1.0, 0.0, 0.0, 1.0, Space::euclidean()};
    // radial plunge into the primary
    const PhaseState s0{{0.4, 0.0}, {-0.9, 0.0}, 0.0};
    IntegrateOptions opts;
    opts.tol = 1e-10;
    const Trajectory traj = integrate(sys, s0, 10.0, opts);
    CHECK(traj.status == FlowStatus::singularity_stop);
    CHECK(traj.t_end() < 10.0);
}

TEST_CASE("poisson bracket properties") {
    SplitMix64 rng(53);
    ModelParams p{1.0, 0.5, 0.0, 1.0, Space::euclidean()};
    const Space flat = Space::euclidean();

    auto e_eucl = [&p](const PhaseState& z) { return energy_euclidean(z, p, Which::two_center); };
    auto e_kep = [&p](const PhaseState& z) { return energy_euclidean(z, p, Which::kepler); };
    auto ang = [&p](const PhaseState& z) { return kepler_first_integrals(z, p.m1).C; };
    auto e_pair = [&p](const PhaseState& z) {
        return energy_curved_chart(unstandardize(z, p.a, p.beta()), p, Which::two_center);
    };

    double trivial = 0, rot = 0, commute = 0, antisym = 0;
    for (int i = 0; i < 100; ++i) {
        const PhaseState s{{rng.uniform(0.3, 1.2), rng.uniform(0.2, 1.0)},
                           {rng.uniform(-1, 1), rng.uniform(-1, 1)},
                           0.0};
        trivial = std::max(trivial, std::abs(poisson_bracket_fd(e_eucl, e_eucl, s, flat)));
        rot = std::max(rot, std::abs(poisson_bracket_fd(e_kep, ang, s, flat)));
        commute = std::max(commute, std::abs(poisson_bracket_fd(e_eucl, e_pair, s, flat)));
        antisym = std::max(antisym, std::abs(poisson_bracket_fd(e_eucl, ang, s, flat) +
                                             poisson_bracket_fd(ang, e_eucl, s, flat)));
    }
    CHECK(trivial <= 1e-10);
    CHECK(rot <= 1e-8);
    CHECK(commute <= 1e-6);
    CHECK(antisym == 0.0); // partials are reused, so the sum cancels exactly
}

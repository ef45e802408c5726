#include "confocal/model.hpp"

#include <cmath>

namespace confocal {

const char* to_string(Which which) {
    switch (which) {
        case Which::kepler:     return "kepler";
        case Which::two_center: return "two_center";
        case Which::lagrange:   return "lagrange";
        case Which::averaged:   return "averaged";
    }
    return "?";
}

void ModelParams::validate() const {
    if (!(a > 0.0))
        throw std::invalid_argument("ModelParams: a must be positive");
    if (space.kind == SpaceKind::hyperbolic && !(a < 1.0))
        throw std::invalid_argument("ModelParams: hyperbolic chart requires a < 1");
    if (!std::isfinite(m1) || !std::isfinite(m2) || !std::isfinite(f) || !std::isfinite(a))
        throw std::invalid_argument("ModelParams: non-finite parameter");
}

namespace {

bool has_m2(Which which) { return which != Which::kepler; }
bool has_f(Which which) { return which == Which::lagrange || which == Which::averaged; }

void check_radius(double r, const char* where) {
    if (r < kSingularRadius) throw SingularityError(std::string(where) + ": evaluation at a center");
}

} // namespace

double flat_potential(Vec2 q, const ModelParams& p, Which which) {
    const double r = q.norm();
    check_radius(r, "flat_potential");
    double v = -p.m1 / r;
    if (has_m2(which)) {
        const double rho = (q - p.second_center_std()).norm();
        check_radius(rho, "flat_potential");
        v -= p.m2 / rho;
    }
    if (has_f(which)) v += p.f * (q - p.hooke_center_std()).norm2();
    return v;
}

Vec2 flat_potential_gradient(Vec2 q, const ModelParams& p, Which which) {
    const double r = q.norm();
    check_radius(r, "flat_potential_gradient");
    Vec2 grad = (p.m1 / (r * r * r)) * q;
    if (has_m2(which)) {
        const Vec2 d = q - p.second_center_std();
        const double rho = d.norm();
        check_radius(rho, "flat_potential_gradient");
        grad += (p.m2 / (rho * rho * rho)) * d;
    }
    if (has_f(which)) grad += 2.0 * p.f * (q - p.hooke_center_std());
    return grad;
}

double flat_secondary_potential(Vec2 q, const ModelParams& p, Which which) {
    double v = 0.0;
    if (has_m2(which)) {
        const double rho = (q - p.second_center_std()).norm();
        check_radius(rho, "flat_secondary_potential");
        v -= p.m2 / rho;
    }
    if (has_f(which)) v += p.f * (q - p.hooke_center_std()).norm2();
    return v;
}

namespace {

struct CurvedTerms {
    double s1, n1, s2, n2; // per-center chart factors: cot/coth(theta_i) = n_i / s_i
};

CurvedTerms curved_terms(Vec2 q, const ModelParams& p) {
    const double kappa = p.kappa_pair();
    const double beta = p.beta();
    CurvedTerms t;
    t.s1 = std::sqrt((q.y - p.a) * (q.y - p.a) + beta * q.x * q.x);
    t.n1 = 1.0 + kappa * p.a * q.y;
    t.s2 = std::sqrt((q.y + p.a) * (q.y + p.a) + beta * q.x * q.x);
    t.n2 = 1.0 - kappa * p.a * q.y;
    return t;
}

} // namespace

double curved_potential(Vec2 q, const ModelParams& p, Which which) {
    const CurvedTerms t = curved_terms(q, p);
    const double sb = p.sqrt_beta();
    check_radius(t.s1, "curved_potential");
    double v = -p.m1 * sb * t.n1 / t.s1;
    if (has_m2(which)) {
        check_radius(t.s2, "curved_potential");
        v -= p.m2 * sb * t.n2 / t.s2;
    }
    if (has_f(which)) v += p.f * q.norm2();
    return v;
}

Vec2 curved_potential_gradient(Vec2 q, const ModelParams& p, Which which) {
    const CurvedTerms t = curved_terms(q, p);
    const double kappa = p.kappa_pair();
    const double beta = p.beta();
    const double sb = p.sqrt_beta();
    check_radius(t.s1, "curved_potential_gradient");

    const Vec2 ds1 = Vec2{beta * q.x, q.y - p.a} / t.s1;
    Vec2 grad = -p.m1 * sb * (Vec2{0.0, kappa * p.a} / t.s1 - (t.n1 / (t.s1 * t.s1)) * ds1);
    if (has_m2(which)) {
        check_radius(t.s2, "curved_potential_gradient");
        const Vec2 ds2 = Vec2{beta * q.x, q.y + p.a} / t.s2;
        grad -= p.m2 * sb * (Vec2{0.0, -kappa * p.a} / t.s2 - (t.n2 / (t.s2 * t.s2)) * ds2);
    }
    if (has_f(which)) grad += 2.0 * p.f * q;
    return grad;
}

double curved_secondary_potential(Vec2 q, const ModelParams& p, Which which) {
    double v = 0.0;
    if (has_m2(which)) {
        const CurvedTerms t = curved_terms(q, p);
        check_radius(t.s2, "curved_secondary_potential");
        v -= p.m2 * p.sqrt_beta() * t.n2 / t.s2;
    }
    if (has_f(which)) v += p.f * q.norm2();
    return v;
}

double energy_euclidean(const PhaseState& s, const ModelParams& p, Which which) {
    return 0.5 * s.v.norm2() + flat_potential(s.q, p, which);
}

double energy_curved_chart(const PhaseState& s, const ModelParams& p, Which which) {
    const double kappa = p.kappa_pair();
    const double rot = cross(s.q, s.v);
    return 0.5 * s.v.norm2() + 0.5 * kappa * rot * rot + curved_potential(s.q, p, which);
}

double energy_curved_native(const PhaseState& s, const ModelParams& p, Which which) {
    const Mat2 g = chart_metric(p.space, s.q);
    return 0.5 * g.quad(s.v) + curved_potential(s.q, p, which);
}

KeplerIntegrals kepler_first_integrals(const PhaseState& s, double m1) {
    const double r = s.q.norm();
    check_radius(r, "kepler_first_integrals");
    const double C = cross(s.q, s.v);
    return {C, {C * s.v.y - m1 * s.q.x / r, -C * s.v.x - m1 * s.q.y / r}};
}

double integral_D(const PhaseState& s, const ModelParams& p) {
    const double r = s.q.norm();
    check_radius(r, "integral_D");
    const double C = cross(s.q, s.v);
    return C * C - 2.0 * p.h() * (C * s.v.x + p.m1 * s.q.y / r);
}

double remainder_K(const PhaseState& s, const ModelParams& p, Which which) {
    const double kappa = p.kappa_pair();
    const double beta = p.beta();
    double k = 0.0;
    if (has_m2(which)) {
        const double rho = (s.q - p.second_center_std()).norm();
        check_radius(rho, "remainder_K");
        k += p.m2 * (p.a * p.sqrt_beta() * s.q.y + 2.0 * p.a * p.a) / rho;
    }
    if (has_f(which)) k -= p.a * p.a * p.f * s.q.x * s.q.x;
    return kappa * (2.0 / beta) * k;
}

double identity_residual(const PhaseState& raw_flat, const ModelParams& p, Which which) {
    const double lhs = energy_curved_chart(raw_flat, p, which);
    const PhaseState std_state = standardize(raw_flat, p.a, p.beta());
    const double e_kep = energy_euclidean(std_state, p, Which::kepler);
    const double v2 = flat_secondary_potential(std_state.q, p, which);
    const double d = integral_D(std_state, p);
    const double k = remainder_K(std_state, p, which);
    const double rhs = p.beta() * (e_kep + v2 + (p.kappa_pair() * d + k) / 2.0);
    return lhs - rhs;
}

PhaseState to_flat_clock(const PhaseState& s, Space space) {
    return {s.q, s.v / time_rescale(space, s.q), s.t};
}

PhaseState to_curved_clock(const PhaseState& s, Space space) {
    return {s.q, time_rescale(space, s.q) * s.v, s.t};
}

PhaseState matched_curved_state(const PhaseState& std_flat, const ModelParams& p) {
    return to_curved_clock(unstandardize(std_flat, p.a, p.beta()), p.space);
}

PhaseState matched_flat_state(const PhaseState& raw_curved, const ModelParams& p) {
    return standardize(to_flat_clock(raw_curved, p.space), p.a, p.beta());
}

PhaseState native_to_flat_std(const PhaseState& native, const ModelParams& p) {
    return p.space.curved() ? matched_flat_state(native, p) : native;
}

FirstIntegrals evaluate_integrals(const PhaseState& native, const ModelParams& p, Which which) {
    const Which base = smooth_base(which);
    const bool curved = p.space.curved();
    const PhaseState std_state = native_to_flat_std(native, p);
    const PhaseState raw_flat = curved ? to_flat_clock(native, p.space) : unstandardize(native, p.a, p.beta());

    FirstIntegrals out;
    out.e_kep = energy_euclidean(std_state, p, Which::kepler);
    const KeplerIntegrals ki = kepler_first_integrals(std_state, p.m1);
    out.C = ki.C;
    out.A = ki.A;
    out.D = integral_D(std_state, p);
    out.K = remainder_K(std_state, p, base);
    out.e_pair = energy_curved_chart(raw_flat, p, base);
    out.residual = identity_residual(raw_flat, p, base);
    out.e_target = curved ? energy_curved_native(native, p, base) : energy_euclidean(native, p, base);
    return out;
}

} // namespace confocal

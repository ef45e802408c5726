#include "confocal/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace confocal {

const char* to_string(SpaceKind kind) {
    switch (kind) {
        case SpaceKind::euclidean:  return "euclidean";
        case SpaceKind::spherical:  return "spherical";
        case SpaceKind::hyperbolic: return "hyperbolic";
    }
    return "?";
}

double scaled_norm(Vec2 v, double a) {
    return std::sqrt(v.x * v.x + v.y * v.y / (1.0 + a * a));
}

PhaseState standardize(const PhaseState& raw, double a, double beta) {
    const double sb = std::sqrt(beta);
    return {{raw.q.x, (raw.q.y - a) / sb}, {raw.v.x, raw.v.y / sb}, raw.t};
}

PhaseState unstandardize(const PhaseState& std_state, double a, double beta) {
    const double sb = std::sqrt(beta);
    return {{std_state.q.x, sb * std_state.q.y + a}, {std_state.v.x, sb * std_state.v.y}, std_state.t};
}

std::array<double, 4> standardize(double x, double y, double vx, double vy, double a) {
    const PhaseState s = standardize({{x, y}, {vx, vy}, 0.0}, a, 1.0 + a * a);
    return {s.q.x, s.q.y, s.v.x, s.v.y};
}

bool chart_domain_ok(Space space, Vec2 q) {
    switch (space.kind) {
        case SpaceKind::euclidean:
            return true;
        case SpaceKind::spherical:
            // Lifted third coordinate is -1/sqrt(1+|q|^2); reject once it is
            // numerically at the equator.
            return 1.0 / std::sqrt(1.0 + q.norm2()) > kChartDomainMargin;
        case SpaceKind::hyperbolic:
            return q.norm2() < 1.0 - kChartDomainMargin;
    }
    return false;
}

AmbientState lift_to_surface(const PhaseState& state, Space space) {
    if (!space.curved())
        throw ChartDomainError("lift_to_surface: euclidean chart has no ambient lift");
    if (!chart_domain_ok(space, state.q))
        throw ChartDomainError("lift_to_surface: point outside chart domain");

    const double kappa = space.curvature();
    const Vec2 q = state.q;
    const Vec2 v = state.v;
    const double w = 1.0 + kappa * q.norm2(); // squared lift normalizer
    const double s = std::sqrt(w);
    const double sdot = kappa * dot(q, v) / s;

    const Vec3 point{q.x / s, q.y / s, -1.0 / s};
    // d/dt of (q, -1)/s along the chart motion.
    const Vec3 velocity{(v.x * s - q.x * sdot) / w, (v.y * s - q.y * sdot) / w, sdot / w};
    return {point, velocity};
}

PhaseState project_to_chart(const AmbientState& ambient, Space space, double t) {
    if (!space.curved())
        throw ChartDomainError("project_to_chart: euclidean chart has no ambient lift");
    const double z = ambient.point.z;
    if (!(z < 0.0))
        throw ChartDomainError("project_to_chart: point not in the projectable set");

    const Vec2 q{-ambient.point.x / z, -ambient.point.y / z};
    // Differential of the central projection (X,Y,Z) -> (-X/Z, -Y/Z).
    const Vec2 v{(-ambient.velocity.x - q.x * ambient.velocity.z) / z,
                 (-ambient.velocity.y - q.y * ambient.velocity.z) / z};
    if (!chart_domain_ok(space, q))
        throw ChartDomainError("project_to_chart: image outside chart domain");
    return {q, v, t};
}

double ambient_dot(Space space, Vec3 a, Vec3 b) {
    const double zsign = space.kind == SpaceKind::hyperbolic ? -1.0 : 1.0;
    return a.x * b.x + a.y * b.y + zsign * a.z * b.z;
}

double geodesic_distance(Space space, Vec2 qa, Vec2 qb) {
    switch (space.kind) {
        case SpaceKind::euclidean:
            return (qa - qb).norm();
        case SpaceKind::spherical: {
            const Vec3 pa = lift_to_surface({qa, {}, 0.0}, space).point;
            const Vec3 pb = lift_to_surface({qb, {}, 0.0}, space).point;
            return std::acos(std::clamp(dot(pa, pb), -1.0, 1.0));
        }
        case SpaceKind::hyperbolic: {
            const Vec3 pa = lift_to_surface({qa, {}, 0.0}, space).point;
            const Vec3 pb = lift_to_surface({qb, {}, 0.0}, space).point;
            return std::acosh(std::max(1.0, -ambient_dot(space, pa, pb)));
        }
    }
    return 0.0;
}

Mat2 chart_metric(Space space, Vec2 q) {
    if (!space.curved()) return Mat2::identity();
    const double kappa = space.curvature();
    const double w = 1.0 + kappa * q.norm2();
    const double w2 = w * w;
    return {1.0 / w - kappa * q.x * q.x / w2, -kappa * q.x * q.y / w2, 1.0 / w - kappa * q.y * q.y / w2};
}

Mat2 chart_metric_inverse(Space space, Vec2 q) {
    if (!space.curved()) return Mat2::identity();
    const double kappa = space.curvature();
    const double w = 1.0 + kappa * q.norm2();
    // (g/W - kappa q q^T / W^2)^{-1} = W (I + kappa q q^T), using W - kappa|q|^2 = 1.
    return {w * (1.0 + kappa * q.x * q.x), w * kappa * q.x * q.y, w * (1.0 + kappa * q.y * q.y)};
}

std::array<Mat2, 2> chart_metric_derivative(Space space, Vec2 q) {
    if (!space.curved()) return {Mat2{0, 0, 0}, Mat2{0, 0, 0}};
    const double kappa = space.curvature();
    const double w = 1.0 + kappa * q.norm2();
    const double w2 = w * w, w3 = w2 * w;
    const double qc[2] = {q.x, q.y};
    std::array<Mat2, 2> d;
    for (int k = 0; k < 2; ++k) {
        auto entry = [&](int i, int j) {
            const double dij = i == j ? 1.0 : 0.0;
            const double dik = i == k ? 1.0 : 0.0;
            const double djk = j == k ? 1.0 : 0.0;
            return -2.0 * kappa * qc[k] * dij / w2 - kappa * (dik * qc[j] + djk * qc[i]) / w2 +
                   4.0 * qc[i] * qc[j] * qc[k] / w3;
        };
        d[k] = Mat2{entry(0, 0), entry(0, 1), entry(1, 1)};
    }
    return d;
}

std::array<Mat2, 2> chart_metric_inverse_derivative(Space space, Vec2 q) {
    if (!space.curved()) return {Mat2{0, 0, 0}, Mat2{0, 0, 0}};
    const double kappa = space.curvature();
    const double w = 1.0 + kappa * q.norm2();
    const double qc[2] = {q.x, q.y};
    std::array<Mat2, 2> d;
    for (int k = 0; k < 2; ++k) {
        auto entry = [&](int i, int j) {
            const double dij = i == j ? 1.0 : 0.0;
            const double dik = i == k ? 1.0 : 0.0;
            const double djk = j == k ? 1.0 : 0.0;
            // d/dq_k [ W (delta_ij + kappa q_i q_j) ]
            return 2.0 * kappa * qc[k] * (dij + kappa * qc[i] * qc[j]) +
                   w * kappa * (dik * qc[j] + djk * qc[i]);
        };
        d[k] = Mat2{entry(0, 0), entry(0, 1), entry(1, 1)};
    }
    return d;
}

double time_rescale(Space space, Vec2 q) {
    return 1.0 + space.curvature() * q.norm2();
}

PhaseState reflect_vector(const PhaseState& state, Vec2 normal, Space space) {
    if (normal.norm2() == 0.0)
        throw std::invalid_argument("reflect_vector: zero normal");
    const Mat2 g = chart_metric(space, state.q);
    const double nn = g.quad(normal);
    const Vec2 nhat = normal / std::sqrt(nn);
    const double vn = dot(state.v, g * nhat);
    PhaseState out = state;
    out.v = state.v - 2.0 * vn * nhat;
    return out;
}

} // namespace confocal

#pragma once

#include <array>

#include "confocal/errors.hpp"
#include "confocal/vec.hpp"

namespace confocal {

enum class SpaceKind { euclidean, spherical, hyperbolic };

// A constant-curvature configuration surface together with its planar chart.
// The sphere is charted by central (gnomonic) projection of the lower
// hemisphere onto the plane z = -1; the hyperbolic plane by central projection
// of a pseudosphere sheet onto the same plane, which gives the open unit disk.
struct Space {
    SpaceKind kind = SpaceKind::euclidean;

    static constexpr Space euclidean() { return {SpaceKind::euclidean}; }
    static constexpr Space spherical() { return {SpaceKind::spherical}; }
    static constexpr Space hyperbolic() { return {SpaceKind::hyperbolic}; }

    constexpr double curvature() const {
        return kind == SpaceKind::spherical ? 1.0 : kind == SpaceKind::hyperbolic ? -1.0 : 0.0;
    }
    constexpr bool curved() const { return kind != SpaceKind::euclidean; }

    friend constexpr bool operator==(Space a, Space b) { return a.kind == b.kind; }
};

const char* to_string(SpaceKind kind);

// Chart position, chart velocity and time. Which chart (raw or standardized)
// and which clock the velocity refers to is a convention of the caller; the
// flow module documents the per-space convention it uses.
struct PhaseState {
    Vec2 q;
    Vec2 v;
    double t = 0.0;

    friend constexpr bool operator==(const PhaseState&, const PhaseState&) = default;
};

// Norm sqrt(u^2 + v^2/(1+a^2)) attached to the off-center chart frame.
double scaled_norm(Vec2 v, double a);

// Affine change between the raw chart (centers at (0, +-a)) and the
// standardized chart (primary at origin, standard kinetic metric).
// beta is 1+a^2 for the spherical pairing and 1-a^2 for the hyperbolic one.
PhaseState standardize(const PhaseState& raw, double a, double beta);
PhaseState unstandardize(const PhaseState& std_state, double a, double beta);
// Spec form, spherical pairing.
std::array<double, 4> standardize(double x, double y, double vx, double vy, double a);

// Point on the embedded surface with a tangent vector, in ambient R^3
// (Minkowski R^{2,1} for the hyperbolic sheet).
struct AmbientState {
    Vec3 point;
    Vec3 velocity;
};

// Margin used by the chart-domain guards.
inline constexpr double kChartDomainMargin = 1e-9;

bool chart_domain_ok(Space space, Vec2 q);

// Lift a raw-chart state to the surface; velocity is pushed forward by the
// chart differential. Throws ChartDomainError outside the chart domain.
AmbientState lift_to_surface(const PhaseState& state, Space space);
PhaseState project_to_chart(const AmbientState& ambient, Space space, double t = 0.0);

// Ambient bilinear form (Euclidean on the sphere, Minkowski on the sheet).
double ambient_dot(Space space, Vec3 a, Vec3 b);

// Geodesic distance between two raw-chart points (Euclidean: plain distance).
double geodesic_distance(Space space, Vec2 qa, Vec2 qb);

// Kinetic metric of the chart dynamics: identity for the Euclidean
// (standardized) chart, pullback of the round / pseudosphere metric under
// central projection for the curved raw charts.
Mat2 chart_metric(Space space, Vec2 q);
Mat2 chart_metric_inverse(Space space, Vec2 q);
// d g / dx and d g / dy.
std::array<Mat2, 2> chart_metric_derivative(Space space, Vec2 q);
std::array<Mat2, 2> chart_metric_inverse_derivative(Space space, Vec2 q);

// Ratio dt_flat / dt_curved along projectively matched orbits
// (curved-clock chart velocity = time_rescale * flat-clock chart velocity).
double time_rescale(Space space, Vec2 q);

// Elastic reflection of the velocity across the plane orthogonal (in the
// chart metric) to `normal`. Position and time unchanged.
PhaseState reflect_vector(const PhaseState& state, Vec2 normal, Space space);

} // namespace confocal

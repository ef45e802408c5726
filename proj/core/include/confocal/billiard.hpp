#pragma once

#include <optional>
#include <vector>

#include "confocal/flow.hpp"

namespace confocal {

enum class WallKind { ellipse, hyperbola_branch, focal_line };

const char* to_string(WallKind kind);

// Optional restriction of a wall to an arc, as a polar-angle window about the
// midpoint of the foci in the native chart. phi0 -> phi1 counterclockwise.
struct ArcWindow {
    double phi0 = 0.0;
    double phi1 = 0.0;

    friend constexpr bool operator==(const ArcWindow&, const ArcWindow&) = default;
};

// Member of a confocal family, defined metrically through the focal
// distances so that the same definition serves the plane, the sphere and the
// hyperbolic plane (geodesic distances on the curved surfaces).
//   ellipse:          r1 + r2 - 2s = 0,   s > c
//   hyperbola branch: branch*(r1 - r2) - 2s = 0,   0 < s < c
//   focal_line:       r1 - r2 = 0
// with c half the interfocal distance. Foci live in the system's native
// chart; offsetting them yields the non-confocal negative controls.
struct Wall {
    WallKind kind = WallKind::focal_line;
    double s = 0.0;
    int branch = +1;
    Vec2 focus1;
    Vec2 focus2;
    std::optional<ArcWindow> arc;

    static Wall confocal(WallKind kind, double s, int branch, const ModelParams& params,
                         Vec2 offset = {0.0, 0.0});
    void validate(Space space) const;
};

double wall_value(const Wall& wall, Vec2 point, Space space);
// Chart gradient of wall_value (a covector).
Vec2 wall_gradient(const Wall& wall, Vec2 point, Space space);
// Metric-unit normal vector: ginv * grad, normalized in the chart metric.
Vec2 wall_unit_normal(const Wall& wall, Vec2 point, Space space);

struct Impact {
    double t = 0.0;
    Vec2 point;
    int wall_index = 0;
};

// Earliest sign change of any wall value along the dense segment, refined by
// bisection to time tolerance 1e-12. Crossings outside a wall's arc window
// are pass-throughs. Crossings at or before t_min are ignored.
std::optional<Impact> find_impact(const DenseSegment<4>& segment, const std::vector<Wall>& walls,
                                  Space space, double t_min);

enum class BilliardStatus {
    ok,
    singularity_stop,
    chart_domain_stop,
    step_underflow,
    max_steps,
    focus_degeneracy,
    corner_degeneracy,
};

const char* to_string(BilliardStatus status);

struct BounceRecord {
    double t = 0.0;
    Vec2 point;
    Vec2 v_pre;
    Vec2 v_post;
    FirstIntegrals pre;
    FirstIntegrals post;
    bool graze = false;
    int wall_index = 0;
};

struct BilliardResult {
    Trajectory trajectory;
    std::vector<BounceRecord> bounces;
    BilliardStatus status = BilliardStatus::ok;

    int reflections() const;
};

inline constexpr double kGrazeTolerance = 1e-10;
inline constexpr double kFocusDegeneracyRadius = 1e-8;
inline constexpr double kReflectionNudge = 1e-12;

// Alternate the governing flow with elastic reflections at the walls.
// The governing energy is conserved across reflections for the smooth
// systems; for the averaged system E_kep and D are, while its own
// Hamiltonian may jump (the jump is logged in the records, not constrained).
BilliardResult run_billiard(const SystemSelector& sys, const std::vector<Wall>& walls,
                            const PhaseState& state, double t_end, int max_bounces,
                            const IntegrateOptions& opts = {});

} // namespace confocal

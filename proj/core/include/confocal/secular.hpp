#pragma once

#include "confocal/model.hpp"

namespace confocal {

struct SystemSelector;

// Singularity-free planar elements of an osculating Kepler ellipse in the
// standardized flat picture. Defined only in region R (E_kep < 0, C != 0).
struct OrbitElements {
    double L = 1.0;   // circular angular momentum: E_kep = -m1^2 / (2 L^2)
    double k = 0.0;   // e cos g (equinoctial eccentricity vector)
    double h = 0.0;   // e sin g
    double ell = 0.0; // mean anomaly
    double sgn = 1.0; // orientation, sign of the angular momentum

    double ecc() const { return std::sqrt(k * k + h * h); }
    double sma(double m1) const { return L * L / m1; }
    double angular_momentum() const { return sgn * L * std::sqrt(std::max(0.0, 1.0 - k * k - h * h)); }
    double mean_motion(double m1) const { return m1 * m1 / (L * L * L); }
    double period(double m1) const;
    double energy(double m1) const { return -m1 * m1 / (2.0 * L * L); }
};

struct AveragedSystem {
    ModelParams params;
    double qtol = 1e-12;
    int node_cap = 1 << 14;
    int fixed_nodes = 0;     // >0: use exactly this trapezoid rule, skip region scans
    bool orbit_average = false; // curved secondary average along the integrated orbit
    double flow_tol = 1e-12; // tolerance of the orbit_average integration
};

AveragedSystem make_averaged(const SystemSelector& sys);

// Solve E - e sin E = ell to 1e-14 (Newton with a bisection safeguard).
double solve_kepler(double ell, double e);

OrbitElements state_to_elements(const PhaseState& std_state, double m1);
PhaseState elements_to_state(const OrbitElements& el, double m1, double ell);

// Minimum standardized distance from the osculating orbit to the second
// center, and maximum raw-chart radius (hyperbolic containment check).
double orbit_min_secondary_distance(const OrbitElements& el, const ModelParams& p);
double orbit_max_raw_radius(const OrbitElements& el, const ModelParams& p);

// Throws RegionError when the orbit enters the exclusion ball around the
// second center or leaves the hyperbolic chart disk.
void require_orbit_clear(const OrbitElements& el, const AveragedSystem& avg);

inline constexpr double kExclusionRadius = 1e-6;

// Average of the perturbing potential over the closed unperturbed orbit.
// Flat spaces: mean-anomaly average; curved spaces: time average over the
// curved closed orbit, computed on the same nodes with the projective
// dwell-time weight. Adaptive node doubling unless fixed_nodes is set.
double averaged_secondary_potential(const OrbitElements& el, const AveragedSystem& avg);

// Number of nodes at which the adaptive rule converged for this orbit.
int converged_node_count(const PhaseState& native, const AveragedSystem& avg);

// E_kep + <V2> (flat) or native curved Kepler energy + <V2> (curved).
double averaged_hamiltonian(const PhaseState& native, const AveragedSystem& avg);

// Hamiltonian vector field of the averaged system on the Legendre-identified
// tangent bundle; gradients by central differences with one Richardson level
// through the (locked) quadrature.
PhaseDeriv averaged_vector_field(const PhaseState& native, const AveragedSystem& avg);

// Reduced secular field on the eccentricity vector at fixed L, from the
// Delaunay form dG/dt = -dV/dg, dg/dt = dV/dG. Requires e > 0.
struct SecularRates {
    double dk = 0.0;
    double dh = 0.0;
};
SecularRates reduced_secular_rates(const OrbitElements& el, const AveragedSystem& avg);

// First-return period of the unperturbed Kepler flow through `native`
// (Poincare section through the initial phase point). Flat spaces return the
// analytic period.
double closed_orbit_period(const PhaseState& native, const ModelParams& p, double tol);

// Cross-check route: average the perturbing potential by integrating the
// unperturbed orbit over one detected period.
double orbit_average_secondary(const PhaseState& native, const AveragedSystem& avg);

} // namespace confocal

#pragma once

#include "confocal/geometry.hpp"

namespace confocal {

enum class Which { kepler, two_center, lagrange, averaged };

const char* to_string(Which which);

// For potential/energy evaluation the averaged system carries the same terms
// as the Lagrange one (m2 and f enter the perturbation as given).
constexpr Which smooth_base(Which which) {
    return which == Which::averaged ? Which::lagrange : which;
}

// Guard radius for potential evaluations, in chart units.
inline constexpr double kSingularRadius = 1e-12;

// Model parameters. m1 sits at raw-chart (0, a), m2 at (0, -a), the Hooke
// center at the raw-chart origin. In the standardized chart the primary is at
// the origin, the secondary at (0, -2h) and the Hooke center at (0, -h).
struct ModelParams {
    double m1 = 1.0;
    double m2 = 0.0;
    double f = 0.0;
    double a = 1.0;
    Space space = Space::euclidean();

    // Sign of the curved partner in the projective pairing: the Euclidean and
    // spherical problems pair through the sphere (+1), the hyperbolic one
    // through the pseudosphere (-1).
    double kappa_pair() const { return space.kind == SpaceKind::hyperbolic ? -1.0 : 1.0; }
    double beta() const { return 1.0 + kappa_pair() * a * a; }
    double sqrt_beta() const { return std::sqrt(beta()); }
    // Half the standardized distance between the two Kepler centers.
    double h() const { return a / sqrt_beta(); }

    Vec2 second_center_std() const { return {0.0, -2.0 * h()}; }
    Vec2 hooke_center_std() const { return {0.0, -h()}; }

    void validate() const;

    friend constexpr bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct KeplerIntegrals {
    double C = 0.0; // angular momentum xi*eta_dot - eta*xi_dot
    Vec2 A;         // Laplace-Runge-Lenz vector, |A| = m1 * eccentricity
};

struct PhaseDeriv {
    Vec2 dq;
    Vec2 dv;
};

// All first integrals of one state, evaluated in the standardized flat
// picture. e_pair is the energy of the projectively corresponding system
// (spherical partner for euclidean/spherical, pseudospherical for hyperbolic).
struct FirstIntegrals {
    double e_target = 0.0;
    double e_kep = 0.0;
    double C = 0.0;
    Vec2 A;
    double D = 0.0;
    double K = 0.0;
    double e_pair = 0.0;
    double residual = 0.0;

    // Component of A toward the second center (which sits on the -eta axis).
    double a1() const { return -A.y; }
};

// ---- potentials (position only) --------------------------------------------

// Standardized flat chart.
double flat_potential(Vec2 q_std, const ModelParams& p, Which which);
Vec2 flat_potential_gradient(Vec2 q_std, const ModelParams& p, Which which);
// Perturbing part only (m2 term + Hooke term).
double flat_secondary_potential(Vec2 q_std, const ModelParams& p, Which which);

// Raw chart of the curved partner; masses scaled by sqrt(beta) per the
// projective correspondence of parameters.
double curved_potential(Vec2 q_raw, const ModelParams& p, Which which);
Vec2 curved_potential_gradient(Vec2 q_raw, const ModelParams& p, Which which);
double curved_secondary_potential(Vec2 q_raw, const ModelParams& p, Which which);

// ---- energies ---------------------------------------------------------------

// Flat energy in the standardized chart: kinetic |v|^2/2 plus flat_potential.
double energy_euclidean(const PhaseState& std_state, const ModelParams& p, Which which);

// Energy of the curved partner as a function of the flat system's raw-chart
// state (positions and flat-clock velocities). For kappa = +1 this is the
// spherical two-center/Lagrange energy; for kappa = -1 the hyperbolic one.
double energy_curved_chart(const PhaseState& raw_flat, const ModelParams& p, Which which);

// Native energy of the curved dynamics: u' g(q) u / 2 + curved_potential,
// with u the curved-clock chart velocity.
double energy_curved_native(const PhaseState& raw_curved, const ModelParams& p, Which which);

// ---- first integrals ---------------------------------------------------------

KeplerIntegrals kepler_first_integrals(const PhaseState& std_state, double m1);

// D = C^2 - 2h(C xi_dot + m1 eta / r), identically C^2 - 2h A1.
double integral_D(const PhaseState& std_state, const ModelParams& p);

// Remainder closing the factorization of the curved partner energy:
//   E_pair = beta (E_kep + V2 + (kappa D + K)/2),
// K = kappa (2/beta) (m2 (a sqrt(beta) eta + 2a^2)/rho - a^2 f xi^2).
double remainder_K(const PhaseState& std_state, const ModelParams& p, Which which);

// E_pair(raw state) minus the factorized right-hand side. The module's master
// self-test: |residual| <= 1e-10 (1 + |E_pair|) at every valid state.
double identity_residual(const PhaseState& raw_flat, const ModelParams& p, Which which);

// ---- projective state matching ----------------------------------------------

// Raw-chart clock conversions between the flat system and its curved partner.
PhaseState to_flat_clock(const PhaseState& raw_curved, Space space);
PhaseState to_curved_clock(const PhaseState& raw_flat, Space space);

// Standardized flat state <-> native curved raw-chart state.
PhaseState matched_curved_state(const PhaseState& std_flat, const ModelParams& p);
PhaseState matched_flat_state(const PhaseState& raw_curved, const ModelParams& p);

// Standardized flat representation of a native state (identity for euclidean).
PhaseState native_to_flat_std(const PhaseState& native, const ModelParams& p);

// Evaluate every first integral of a native state of the smooth system
// `which` (averaged systems: pass their base and fill e_target separately).
FirstIntegrals evaluate_integrals(const PhaseState& native, const ModelParams& p, Which which);

} // namespace confocal

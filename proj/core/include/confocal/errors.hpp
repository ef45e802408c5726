#pragma once

#include <stdexcept>
#include <string>

namespace confocal {

// Evaluation hit (or got too close to) a potential singularity.
struct SingularityError : std::runtime_error {
    explicit SingularityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Point left the chart domain (sphere equator / hyperbolic disk boundary).
struct ChartDomainError : std::domain_error {
    explicit ChartDomainError(const std::string& msg) : std::domain_error(msg) {}
};

// State outside the averaging region (non-elliptic, collisional, excluded orbit).
struct RegionError : std::domain_error {
    explicit RegionError(const std::string& msg) : std::domain_error(msg) {}
};

// Quadrature node cap exceeded or closed-orbit period detection failed.
struct QuadratureError : std::runtime_error {
    explicit QuadratureError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace confocal

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "confocal/billiard.hpp"

namespace confocal {

// Scenario-level wall description; resolved against the model parameters
// when the run starts.
struct WallSpec {
    WallKind kind = WallKind::focal_line;
    double s = 0.0;
    int branch = 1;
    Vec2 offset{0.0, 0.0};
    std::optional<ArcWindow> arc;

    bool operator==(const WallSpec&) const = default;
};

struct RunControls {
    double t_end = 100.0;
    double tol = 1e-10;
    double qtol = 1e-12;
    int max_bounces = 100;
    int samples = 1000;

    bool operator==(const RunControls&) const = default;
};

// Drift bounds are relative to the first row: |x(t) - x(0)| <= bound*(1+|x(0)|).
// Per-bounce bounds compare the records' pre/post values.
struct CheckBounds {
    std::map<std::string, double> drift;
    std::map<std::string, double> per_bounce;

    bool operator==(const CheckBounds&) const = default;
};

// One simulation or billiard configuration. The initial state lives in the
// system's native chart: standardized coordinates with flat-clock velocities
// for euclidean runs, the raw chart with curved-clock velocities otherwise.
struct Scenario {
    std::string name;
    Which system = Which::kepler;
    ModelParams params;
    PhaseState initial_state;
    std::vector<WallSpec> walls;
    RunControls run;
    CheckBounds checks;
    std::uint64_t seed = 1;

    SystemSelector selector() const;
    std::vector<Wall> resolved_walls() const;

    bool operator==(const Scenario&) const = default;
};

// Parse and fully validate a scenario document. Unknown keys are rejected
// with the offending location in the message. Throws std::runtime_error on
// parse/validation problems (the CLI maps these to exit code 2).
Scenario parse_scenario(const std::filesystem::path& path);
Scenario parse_scenario_text(const std::string& text, const std::string& origin = "<string>");

// Stable-key-order re-emission; parse(emit(s)) == s.
std::string emit_scenario(const Scenario& scenario);

} // namespace confocal

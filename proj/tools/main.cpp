#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "confocal/runner.hpp"

namespace {

constexpr const char* kColumnDoc =
    "trajectory.csv columns:\n"
    "  t                 time of the governing flow\n"
    "  xi, eta           standardized chart position (primary center at the origin,\n"
    "                    second center on the negative eta axis); curved runs are\n"
    "                    reported through the projective matching\n"
    "  vxi, veta         standardized flat-clock chart velocity\n"
    "  E_target          energy of the governing system (averaged Hamiltonian for\n"
    "                    averaged runs)\n"
    "  E_kep             Kepler energy of the primary center\n"
    "  C                 angular momentum xi*veta - eta*vxi\n"
    "  A1                Laplace-Runge-Lenz component toward the second center\n"
    "  D                 C^2 - 2 h A1 (h = half the standardized center distance)\n"
    "  E_sph             energy of the projectively paired system (spherical for\n"
    "                    euclidean/spherical runs, pseudospherical for hyperbolic)\n"
    "  identity_residual E_sph minus its factorization through E_kep, D and the\n"
    "                    remainder term\n"
    "bounces.csv: one row per wall event with the same integrals before/after\n"
    "the reflection and their deltas.\n"
    "\n"
    "exit codes: 0 pass, 2 config error, 3 early stop (singularity/chart exit),\n"
    "4 billiard degeneracy (focus or arc corner), 5 check failure.";

struct CommonArgs {
    std::string scenario;
    std::string out_dir = ".";
    std::string svg;
    double tol = 0.0;
    double qtol = 0.0;
    int samples = 0;
    std::uint64_t seed = 0;
    bool has_seed = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_scenario) {
    auto* opt = cmd->add_option("--scenario", args.scenario, "scenario JSON file");
    if (needs_scenario) opt->required();
    cmd->add_option("--out", args.out_dir, "output directory (default: current)");
    cmd->add_option("--tol", args.tol, "override integrator tolerance");
    cmd->add_option("--qtol", args.qtol, "override quadrature tolerance");
    cmd->add_option("--samples", args.samples, "override output samples / check draws");
    cmd->add_option("--seed", args.seed, "override RNG seed")->each([&](const std::string&) {
        args.has_seed = true;
    });
    cmd->add_option("--svg", args.svg, "write a static SVG plot to this path");
}

confocal::Scenario load_with_overrides(const CommonArgs& args) {
    confocal::Scenario sc = confocal::parse_scenario(args.scenario);
    if (args.tol > 0.0) sc.run.tol = args.tol;
    if (args.qtol > 0.0) sc.run.qtol = args.qtol;
    if (args.samples > 0) sc.run.samples = args.samples;
    if (args.has_seed) sc.seed = args.seed;
    return sc;
}

confocal::RunOptions run_options(const CommonArgs& args) {
    confocal::RunOptions opts;
    opts.out_dir = args.out_dir;
    if (!args.svg.empty()) opts.svg = args.svg;
    return opts;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"confocal: two-center, Lagrange and averaged-secular dynamics on\n"
                 "constant-curvature surfaces, with confocal mechanical billiards."};
    app.footer(kColumnDoc);
    app.require_subcommand(1);

    int exit_code = 0;

    CommonArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "integrate a scenario and check invariant drifts");
    add_common(sim, sim_args, true);
    sim->callback([&] {
        exit_code = confocal::run_simulate(load_with_overrides(sim_args), run_options(sim_args));
    });

    CommonArgs bill_args;
    auto* bill = app.add_subcommand("billiard", "run a scenario with reflection walls");
    add_common(bill, bill_args, true);
    bill->callback([&] {
        exit_code = confocal::run_billiard(load_with_overrides(bill_args), run_options(bill_args));
    });

    CommonArgs check_args;
    std::string suite_name;
    auto* check = app.add_subcommand(
        "check", "verification suites: identities, brackets, projective, quadrature");
    check->add_option("suite", suite_name, "identities | brackets | projective | quadrature")
        ->required();
    add_common(check, check_args, false);
    check->callback([&] {
        const auto suite = confocal::check_suite_from_name(suite_name);
        if (!suite) throw CLI::ValidationError("check", "unknown suite '" + suite_name + "'");
        const int samples = check_args.samples > 0
                                ? check_args.samples
                                : (*suite == confocal::CheckSuite::identities ? 1000 : 100);
        const std::uint64_t seed = check_args.has_seed ? check_args.seed : 20240817ull;
        exit_code = confocal::run_check(*suite, samples, seed, run_options(check_args));
    });

    CommonArgs sweep_args;
    int jobs = 1;
    auto* sweep = app.add_subcommand("sweep", "run a batch of scenarios");
    add_common(sweep, sweep_args, true);
    sweep->add_option("--jobs", jobs, "run scenarios on this many threads");
    sweep->callback([&] {
        exit_code = confocal::run_sweep(sweep_args.scenario, run_options(sweep_args), jobs);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : confocal::kExitConfig;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return confocal::kExitConfig;
    }
    return exit_code;
}

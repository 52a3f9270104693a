// Command-line driver for the TL-SPH solid dynamics benchmarks.
//
//   tlsph run <case> [--dp m] [--alpha a] [--no-damping] [--cfl c] [--t-end s] [--omega0 w]
//                    [--stl path] [--out dir] [--threads n] [--config file.json]
//   tlsph list-cases
//   tlsph verify
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error, 3 numerical failure.

#include <tlsph/tlsph.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace
{
using namespace tlsph;

constexpr int exit_ok = 0;
constexpr int exit_verify_failed = 1;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct RunFlags
{
    std::string case_id;
    double dp = 0, alpha = 0, cfl = 0, t_end = 0, omega0 = 0;
    bool no_damping = false;
    std::string stl, out = "output", config;
    int threads = 1;
};

SimulationConfig resolve_config(const RunFlags &flags, const CLI::App &run)
{
    SimulationConfig config = preset_config(flags.case_id);
    if (!flags.config.empty())
    {
        std::ifstream in(flags.config);
        if (!in)
            throw ConfigurationError("cannot read config file '" + flags.config + "'");
        nlohmann::json document;
        try
        {
            document = nlohmann::json::parse(in);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ConfigurationError("malformed config file '" + flags.config + "': " + e.what());
        }
        apply_json(config, document);
        if (config.case_id != flags.case_id)
            throw ConfigurationError("config file is for case '" + config.case_id + "', not '" + flags.case_id + "'");
    }
    if (run.count("--dp"))
        config.dp = flags.dp;
    if (run.count("--alpha"))
        config.alpha = flags.alpha;
    if (run.count("--cfl"))
        config.cfl = flags.cfl;
    if (run.count("--t-end"))
        config.t_end = flags.t_end;
    if (run.count("--omega0"))
        config.omega0 = flags.omega0;
    if (run.count("--stl"))
        config.stl_path = flags.stl;
    if (run.count("--threads"))
        config.threads = flags.threads;
    if (flags.no_damping)
        config.alpha = 0.0;
    validate(config);
    return config;
}

void emit_run_manifest(const SimulationConfig &config, const std::filesystem::path &out_dir)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::ofstream out(out_dir / "manifest.json");
    if (!out)
        throw IoError("cannot write manifest in '" + out_dir.string() + "'");
    out << run_manifest(config).dump(2) << '\n';
}

int run_case(const RunFlags &flags, const CLI::App &run)
{
    const SimulationConfig config = resolve_config(flags, run);
    const std::filesystem::path out_dir = std::filesystem::path(flags.out) / config.case_id;
    emit_run_manifest(config, out_dir);

    const auto start = std::chrono::steady_clock::now();
    const RunResult result = run_simulation(config, [&](const Snapshot &snap, Index k) {
        write_vtk_snapshot(snap, out_dir / ("snapshot_" + std::to_string(k) + ".vtk"));
    });
    for (const auto &probe : result.probes)
        write_csv_series(probe, out_dir / (probe.name + ".csv"));
    write_conservation_csv(result.conservation, out_dir / "conservation.csv");
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::cout << "case " << config.case_id << ": " << result.final_state.size() << " particles, " << result.steps
              << " steps to t = " << result.final_time << " s, " << result.snapshots << " snapshots, " << seconds
              << " s wall\n"
              << "outputs in " << out_dir.string() << '\n';
    return exit_ok;
}

int list_cases()
{
    for (const auto &id : case_ids())
    {
        const SimulationConfig c = preset_config(id);
        std::cout << id << "  dp=" << c.dp << " t_end=" << c.t_end << " rho0=" << c.rho0 << " E=" << c.youngs_modulus
                  << " nu=" << c.poisson_ratio << " law=" << to_string(c.law) << '\n';
    }
    return exit_ok;
}

std::string scientific(double x)
{
    std::ostringstream out;
    out << std::scientific << std::setprecision(2) << x;
    return out.str();
}

int verify()
{
    int failures = 0;
    auto report = [&](bool ok, const std::string &name, const std::string &detail) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << " (" << detail << ")\n";
        failures += ok ? 0 : 1;
    };

    {
        // characteristics vs Godunov finite volumes for the cable tip
        const CableOracle oracle;
        CableFiniteVolume fv;
        std::vector<Real> times;
        for (int k = 0; k < 400; ++k)
            times.push_back((k + 0.5) * 1.0e-5);
        const auto exact = oracle.tipHistory(times);
        const auto grid = fv.tipHistory(times);
        Real worst = 0.0;
        for (Index k = 0; k != times.size(); ++k)
            worst = std::max(worst, std::abs(exact.velocity[k] - grid.velocity[k]));
        report(worst <= 0.001 * 5.0, "cable oracle: characteristics vs finite volume",
               "max |dv| = " + scientific(worst) + " m/s");
    }
    {
        const Material m = Material::make(1100.0, 1.7e7, 0.45, ConstitutiveLaw::NeoHookean);
        Matd F;
        F << 1.2, 0.1, 0.0, -0.05, 0.9, 0.02, 0.03, 0.0, 1.05;
        const Matd closed = neo_hookean_S(F, m.lambda, m.mu);
        const Matd fd = energy_gradient_oracle(F, m.lambda, m.mu);
        const Real error = (closed - fd).norm() / closed.norm();
        report(error <= 1e-5, "neo-Hookean stress vs energy finite differences", "rel = " + scientific(error));
    }
    {
        const Real dp = 0.1, h = 1.15 * dp;
        LatticeBody lattice = generate_lattice_box(Vecd::Constant(1.2), dp);
        ParticleSystem system(lattice.positions, lattice.volumes, 1.0);
        const auto neighborhood = build_reference_neighborhoods(system.r0, h);
        compute_correction_matrices(system, neighborhood);
        Matd A;
        A << 0.1, -0.3, 0.2, 0.05, 0.0, 0.4, -0.2, 0.1, -0.1;
        for (Index i = 0; i != system.size(); ++i)
            system.v[i] = A * system.r0[i];
        deformation_gradient_rate(system, neighborhood);
        Real worst = 0.0;
        for (Index i = 0; i != system.size(); ++i)
            worst = std::max(worst, (system.dF_dt[i] - affine_motion_oracle(A).dF_dt).cwiseAbs().maxCoeff());
        report(worst <= 1e-10, "affine velocity recovers dF/dt", "max err = " + scientific(worst));
    }
    return failures == 0 ? exit_ok : exit_verify_failed;
}
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Total Lagrangian SPH solid dynamics with Kelvin-Voigt artificial damping"};
    app.require_subcommand(1);

    RunFlags flags;
    CLI::App *run = app.add_subcommand("run", "run a benchmark case");
    run->add_option("case", flags.case_id, "case id (cable, bending, twisting, stl)")->required();
    run->add_option("--dp", flags.dp, "particle spacing (m)");
    run->add_option("--alpha", flags.alpha, "damping scale alpha (default 0.5)");
    run->add_flag("--no-damping", flags.no_damping, "disable the damper (alpha = 0)");
    run->add_option("--cfl", flags.cfl, "CFL number (default 0.6)");
    run->add_option("--t-end", flags.t_end, "end time (s)");
    run->add_option("--omega0", flags.omega0, "twisting peak angular velocity (rad/s)");
    run->add_option("--stl", flags.stl, "STL geometry for the stl case");
    run->add_option("--out", flags.out, "output directory (default ./output)");
    run->add_option("--threads", flags.threads, "worker threads");
    run->add_option("--config", flags.config, "flat JSON config overriding the preset");

    app.add_subcommand("list-cases", "list benchmark presets");
    app.add_subcommand("verify", "run the reference-solution checks");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return exit_config;
    }

    try
    {
        if (app.got_subcommand("run"))
            return run_case(flags, *run);
        if (app.got_subcommand("list-cases"))
            return list_cases();
        return verify();
    }
    catch (const SimulationFailure &e)
    {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }
    catch (const NumericalError &e)
    {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }
    catch (const Error &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    }
}

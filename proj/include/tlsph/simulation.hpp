#pragma once

/**
 * @file simulation.hpp
 * @brief Run driver: case setup, adaptive time stepping, probes, conservation samples and
 *        snapshots at fixed cadences.
 */

#include "cases.hpp"
#include "diagnostics.hpp"
#include "tlsph_core.hpp"

#include <functional>

namespace tlsph
{
/** Numerical failure during a run, tagged with the simulation time and step count. */
class SimulationFailure : public NumericalError
{
  public:
    SimulationFailure(const std::string &what, Real time, Index step)
        : NumericalError(what + " at t = " + detail::format_real(time) + " s (step " + std::to_string(step) + ")"),
          time_(time), step_(step) {}

    Real time() const { return time_; }
    Index step() const { return step_; }

  private:
    Real time_;
    Index step_;
};

struct RunResult
{
    std::vector<ProbeSeries> probes; // per probe point: <name>_velocity, <name>_displacement
    std::vector<ConservationReport> conservation;
    Index snapshots = 0;
    Index steps = 0;
    Real final_time = 0.0;
    ParticleSystem final_state;

    const ProbeSeries &probe(const std::string &name) const
    {
        for (const auto &p : probes)
            if (p.name == name)
                return p;
        throw ParameterError("no probe named '" + name + "'");
    }
};

using SnapshotSink = std::function<void(const Snapshot &, Index index)>;

namespace detail
{
/** Next multiple of `interval` strictly after `time`, as an exact multiple k * interval. */
inline Real next_event(Real time, Real interval, Index &k)
{
    while (Real(k) * interval <= time)
        ++k;
    return Real(k) * interval;
}
} // namespace detail

inline RunResult run_simulation(const SimulationConfig &config, const SnapshotSink &sink = {})
{
    validate(config);
    set_thread_count(config.threads);
    CaseBody body = build_case_body(config);
    Solver solver(std::move(body.system), config.material(), config.h(), config.gravity);

    RunResult result;
    std::vector<Index> probe_particles;
    for (const auto &probe : body.probes)
    {
        const Index particle = nearest_particle(solver.system().r0, probe.point);
        probe_particles.push_back(particle);
        result.probes.push_back({probe.name + "_velocity", particle, {}, {}});
        result.probes.push_back({probe.name + "_displacement", particle, {}, {}});
    }

    Index snapshot_index = 0;
    auto sample = [&](Real time) {
        const ParticleSystem &s = solver.system();
        for (Index p = 0; p != probe_particles.size(); ++p)
        {
            result.probes[2 * p].record(time, s.v[probe_particles[p]]);
            result.probes[2 * p + 1].record(time, s.displacement(probe_particles[p]));
        }
        result.conservation.push_back(conservation_report(s, solver.material(), time));
    };
    auto snapshot = [&](Real time) {
        if (sink)
            sink(make_snapshot(solver.system(), time), snapshot_index);
        ++snapshot_index;
    };

    try
    {
        solver.initialize();
    }
    catch (const NumericalError &e)
    {
        throw SimulationFailure(e.what(), 0.0, 0);
    }
    sample(0.0);
    snapshot(0.0);

    Index probe_k = 0, snapshot_k = 0;
    Real next_probe = detail::next_event(0.0, config.probe_interval, probe_k);
    Real next_snapshot = detail::next_event(0.0, config.snapshot_interval, snapshot_k);
    Real last_sample = 0.0, last_snapshot = 0.0;

    while (solver.time() < config.t_end)
    {
        const Real time = solver.time();
        const Real target = std::min({next_probe, next_snapshot, config.t_end});
        try
        {
            Real dt = solver.stableTimestep(config.cfl);
            if (time + dt >= target)
                solver.advanceTo(target);
            else if (target - (time + dt) < 0.25 * dt)
                solver.advance(0.5 * (target - time)); // avoid a sliver step before the event
            else
                solver.advance(dt);
        }
        catch (const NumericalError &e)
        {
            throw SimulationFailure(e.what(), solver.time(), solver.steps());
        }

        const Real now = solver.time();
        if (now >= next_probe || now >= config.t_end)
        {
            if (now > last_sample)
            {
                sample(now);
                last_sample = now;
            }
            next_probe = detail::next_event(now, config.probe_interval, probe_k);
        }
        if (now >= next_snapshot || now >= config.t_end)
        {
            if (now > last_snapshot)
            {
                snapshot(now);
                last_snapshot = now;
            }
            next_snapshot = detail::next_event(now, config.snapshot_interval, snapshot_k);
        }
    }

    result.snapshots = snapshot_index;
    result.steps = solver.steps();
    result.final_time = solver.time();
    result.final_state = solver.system();
    return result;
}

} // namespace tlsph

#pragma once

/**
 * @file tlsph_core.hpp
 * @brief Discrete total Lagrangian SPH operators and the position-based Verlet integrator.
 *
 * Conventions: r_ij = r_i - r_j, gradients are grad_i W_ij from the reference configuration.
 *   B0_i    = ( -sum_j V0_j r0_ij (x) grad_i W_ij )^-1
 *   dF_i/dt = ( -sum_j V0_j v_ij (x) grad_i W_ij ) B0_i
 *   dv_i/dt = 2/m_i sum_j V0_i V0_j 1/2 (P_i B0_i + P_j B0_j) grad_i W_ij + g
 */

#include "common.hpp"
#include "kernel.hpp"
#include "materials.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>

namespace tlsph
{
enum class Constraint : unsigned char
{
    Free,
    Clamped,
    Prescribed
};

/** Imposed velocity as a function of time and reference position. */
using PrescribedVelocity = std::function<Vecd(Real time, const Vecd &r0)>;

//=================================================================================================//
/** Flat per-particle solver state. Displacement is always r - r0. */
struct ParticleSystem
{
    std::vector<Vecd> r0, r, v, acceleration;
    std::vector<Matd> F, dF_dt, B0;
    std::vector<Matd> S;  // total second Piola-Kirchhoff stress of the last evaluation
    std::vector<Matd> PB; // P_i B0_i, cached between stress evaluation and the momentum sum
    std::vector<Real> mass, V0;
    std::vector<Constraint> constraint;
    std::vector<Index> motion_group;
    std::vector<PrescribedVelocity> motions;

    ParticleSystem() = default;

    /** Quiescent, undeformed body with per-particle volumes and m = rho0 V0. */
    ParticleSystem(std::span<const Vecd> positions, std::span<const Real> volumes, Real rho0)
    {
        if (positions.size() != volumes.size())
            throw ParameterError("positions and volumes differ in length");
        const Index n = positions.size();
        r0.assign(positions.begin(), positions.end());
        r = r0;
        v.assign(n, Vecd::Zero());
        acceleration.assign(n, Vecd::Zero());
        F.assign(n, Matd::Identity());
        dF_dt.assign(n, Matd::Zero());
        B0.assign(n, Matd::Identity());
        S.assign(n, Matd::Zero());
        PB.assign(n, Matd::Zero());
        V0.assign(volumes.begin(), volumes.end());
        mass.resize(n);
        for (Index i = 0; i != n; ++i)
            mass[i] = rho0 * V0[i];
        constraint.assign(n, Constraint::Free);
        motion_group.assign(n, 0);
    }

    Index size() const { return r0.size(); }
    Vecd displacement(Index i) const { return r[i] - r0[i]; }

    /** Registers a prescribed motion and returns its group id. */
    Index addMotion(PrescribedVelocity motion)
    {
        motions.push_back(std::move(motion));
        return motions.size() - 1;
    }
};

//=================================================================================================//
struct CorrectionOptions
{
    Real max_condition_number = 1.0e8;
};

inline void compute_correction_matrices(ParticleSystem &system, const ReferenceNeighborhood &neighborhood,
                                        CorrectionOptions options = {})
{
    const Index n = system.size();
    for (Index i = 0; i != n; ++i)
    {
        Matd moment = Matd::Zero();
        for (const auto &pair : neighborhood.neighbors(i))
            moment -= system.V0[pair.j] * pair.r0_ij * pair.gradient.transpose();

        const Eigen::JacobiSVD<Matd> svd(moment);
        const auto &sigma = svd.singularValues();
        const Real condition = sigma[2] > 0.0 ? sigma[0] / sigma[2] : std::numeric_limits<Real>::infinity();
        if (!(condition <= options.max_condition_number))
            throw NumericalError("singular correction matrix at particle " + std::to_string(i) + " with " +
                                 std::to_string(neighborhood.neighborCount(i)) +
                                 " neighbors (condition number " + std::to_string(condition) + ")");
        system.B0[i] = moment.inverse();
    }
}

inline void deformation_gradient_rate(ParticleSystem &system, const ReferenceNeighborhood &neighborhood)
{
    particle_for(system.size(), [&](Index i) {
        Matd moment = Matd::Zero();
        const Vecd &v_i = system.v[i];
        for (const auto &pair : neighborhood.neighbors(i))
            moment -= system.V0[pair.j] * (v_i - system.v[pair.j]) * pair.gradient.transpose();
        system.dF_dt[i] = moment * system.B0[i];
    });
}

/** Evaluates S (elastic + damping), caches P B0 per particle. Throws on det F <= 0. */
inline void compute_stresses(ParticleSystem &system, const Material &material, Real pi_coeff)
{
    particle_for(system.size(), [&](Index i) {
        const Matd &F = system.F[i];
        system.S[i] = total_S(material, F, system.dF_dt[i], pi_coeff, i);
        system.PB[i] = first_pk(F, system.S[i]) * system.B0[i];
    });
}

/** Accelerations from the cached P B0 products. */
inline void momentum_rhs(ParticleSystem &system, const ReferenceNeighborhood &neighborhood, const Vecd &gravity)
{
    particle_for(system.size(), [&](Index i) {
        Vecd force = Vecd::Zero();
        const Matd &PB_i = system.PB[i];
        for (const auto &pair : neighborhood.neighbors(i))
            force += system.V0[pair.j] * ((PB_i + system.PB[pair.j]) * pair.gradient);
        system.acceleration[i] = (system.V0[i] / system.mass[i]) * force + gravity;
    });
}

//=================================================================================================//
/**
 * dt = CFL min( h / (c_L + |v|max), sqrt(h / |a|max) ), with c_L the longitudinal wave speed.
 * For nu -> 0.5 c_L tends to the bulk sound speed; at nu = 0 it is sqrt(3) times larger.
 */
inline Real stable_timestep(const ParticleSystem &system, const Material &material, Real h, Real cfl)
{
    if (!(material.longitudinal_wave_speed > 0.0))
        throw ParameterError("wave speed must be positive");
    Real v_max = 0.0, a_max = 0.0;
    for (Index i = 0; i != system.size(); ++i)
    {
        const Real speed = system.v[i].norm();
        const Real accel = system.acceleration[i].norm();
        if (!std::isfinite(speed) || !std::isfinite(accel))
            throw NumericalError("non-finite velocity or acceleration at particle " + std::to_string(i));
        v_max = std::max(v_max, speed);
        a_max = std::max(a_max, accel);
    }
    Real dt = h / (material.longitudinal_wave_speed + v_max);
    if (a_max > 0.0)
        dt = std::min(dt, std::sqrt(h / a_max));
    return cfl * dt;
}

/** Clamped particles are pinned to r0 at rest; prescribed ones take their imposed velocity. */
inline void apply_constraints(ParticleSystem &system, Real time)
{
    for (Index i = 0; i != system.size(); ++i)
    {
        switch (system.constraint[i])
        {
        case Constraint::Clamped:
            system.v[i].setZero();
            system.r[i] = system.r0[i];
            break;
        case Constraint::Prescribed:
            system.v[i] = system.motions[system.motion_group[i]](time, system.r0[i]);
            break;
        case Constraint::Free:
            break;
        }
    }
}

/**
 * One position-based Verlet step: half drift of r and F, velocity kick with freshly evaluated
 * accelerations, then a second half drift with the rates recomputed from the new velocities.
 * `update_rates(system)` refreshes dF_dt, `update_accelerations(system)` fills acceleration.
 */
template <typename RateUpdate, typename AccelerationUpdate>
void step_position_verlet(ParticleSystem &system, Real time, Real dt, RateUpdate &&update_rates,
                          AccelerationUpdate &&update_accelerations)
{
    const Index n = system.size();
    const Real half_dt = 0.5 * dt;

    apply_constraints(system, time);
    particle_for(n, [&](Index i) {
        if (system.constraint[i] != Constraint::Clamped)
            system.r[i] += half_dt * system.v[i];
        system.F[i] += half_dt * system.dF_dt[i];
    });

    update_accelerations(system);
    particle_for(n, [&](Index i) {
        if (system.constraint[i] == Constraint::Free)
            system.v[i] += dt * system.acceleration[i];
    });
    apply_constraints(system, time + dt);

    update_rates(system);
    particle_for(n, [&](Index i) {
        system.F[i] += half_dt * system.dF_dt[i];
        if (system.constraint[i] != Constraint::Clamped)
            system.r[i] += half_dt * system.v[i];
    });
}

//=================================================================================================//
/**
 * Bundles a particle system with its fixed neighborhood and material.
 * initialize() must run once before advance().
 */
class Solver
{
  public:
    Solver(ParticleSystem system, Material material, Real h, Vecd gravity = Vecd::Zero())
        : system_(std::move(system)), material_(material), h_(h), gravity_(gravity),
          pi_coeff_(damping_coefficient(material, h))
    {
        neighborhood_ = build_reference_neighborhoods(system_.r0, h_);
    }

    void initialize()
    {
        compute_correction_matrices(system_, neighborhood_);
        apply_constraints(system_, time_);
        updateRates(system_);
        updateAccelerations(system_);
    }

    Real stableTimestep(Real cfl) const { return stable_timestep(system_, material_, h_, cfl); }

    void advance(Real dt)
    {
        step_position_verlet(
            system_, time_, dt, [this](ParticleSystem &s) { updateRates(s); },
            [this](ParticleSystem &s) { updateAccelerations(s); });
        time_ += dt;
        ++steps_;
    }

    /** Steps exactly onto `target` (> time()). */
    void advanceTo(Real target)
    {
        advance(target - time_);
        time_ = target;
    }

    /** Evaluates stresses for the current F and dF/dt without stepping. */
    void refreshStresses() { compute_stresses(system_, material_, pi_coeff_); }

    const ParticleSystem &system() const { return system_; }
    ParticleSystem &system() { return system_; }
    const ReferenceNeighborhood &neighborhood() const { return neighborhood_; }
    const Material &material() const { return material_; }
    Real smoothingLength() const { return h_; }
    Real dampingCoefficient() const { return pi_coeff_; }
    Real time() const { return time_; }
    Index steps() const { return steps_; }

  private:
    void updateRates(ParticleSystem &s) { deformation_gradient_rate(s, neighborhood_); }
    void updateAccelerations(ParticleSystem &s)
    {
        compute_stresses(s, material_, pi_coeff_);
        momentum_rhs(s, neighborhood_, gravity_);
    }

    ParticleSystem system_;
    ReferenceNeighborhood neighborhood_;
    Material material_;
    Real h_;
    Vecd gravity_;
    Real pi_coeff_;
    Real time_ = 0.0;
    Index steps_ = 0;
};

} // namespace tlsph

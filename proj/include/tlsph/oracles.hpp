#pragma once

/**
 * @file oracles.hpp
 * @brief Independent reference solutions: 1D bar waves (characteristics and a Godunov
 *        finite-volume solver), affine-motion fields, and a finite-difference energy gradient.
 */

#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <span>

namespace tlsph
{
//=================================================================================================//
/**
 * 1D elastic bar on [0, L], fixed at x = 0 and free at x = L, initially unstrained with velocity
 * v0 on [x_start, L] and at rest elsewhere. The d'Alembert solution uses the initial velocity
 * extended oddly about 0 and evenly about L (period 4L).
 */
class CableOracle
{
  public:
    CableOracle(Real youngs_modulus = 200.0e9, Real rho0 = 8000.0, Real length = 10.0, Real x_start = 7.5,
                Real v0 = 5.0)
        : wave_speed_(std::sqrt(youngs_modulus / rho0)), length_(length), x_start_(x_start), v0_(v0)
    {
        if (!(wave_speed_ > 0.0) || !(length > 0.0) || !(x_start >= 0.0 && x_start <= length))
            throw ParameterError("invalid cable oracle parameters");
    }

    Real waveSpeed() const { return wave_speed_; }
    Real length() const { return length_; }

    Real velocity(Real x, Real t) const
    {
        return 0.5 * (extendedVelocity(x - wave_speed_ * t) + extendedVelocity(x + wave_speed_ * t));
    }

    Real displacement(Real x, Real t) const
    {
        return (extendedPrimitive(x + wave_speed_ * t) - extendedPrimitive(x - wave_speed_ * t)) /
               (2.0 * wave_speed_);
    }

    Real tipVelocity(Real t) const { return velocity(length_, t); }
    Real tipDisplacement(Real t) const { return displacement(length_, t); }

    /** Integral of v over the bar per unit cross-section area and density. */
    Real lineMomentum(Real t) const
    {
        const Real s = wave_speed_ * t;
        return 0.5 * (extendedPrimitive(length_ - s) - extendedPrimitive(-s) + extendedPrimitive(length_ + s) -
                      extendedPrimitive(s));
    }

    struct History
    {
        std::vector<Real> velocity, displacement;
    };

    History tipHistory(std::span<const Real> times) const
    {
        History h;
        for (Real t : times)
        {
            h.velocity.push_back(tipVelocity(t));
            h.displacement.push_back(tipDisplacement(t));
        }
        return h;
    }

    /** Times at which the tip velocity jumps, up to t_max. */
    std::vector<Real> tipJumpTimes(Real t_max) const
    {
        std::vector<Real> jumps;
        const Real period = 4.0 * length_ / wave_speed_;
        const Real base[] = {(length_ - x_start_) / wave_speed_, (length_ + x_start_) / wave_speed_,
                             (3.0 * length_ - x_start_) / wave_speed_, (3.0 * length_ + x_start_) / wave_speed_};
        for (Real offset = 0.0; offset <= t_max; offset += period)
            for (Real b : base)
                if (offset + b <= t_max)
                    jumps.push_back(offset + b);
        std::sort(jumps.begin(), jumps.end());
        return jumps;
    }

  private:
    Real baseVelocity(Real y) const { return y >= x_start_ ? v0_ : 0.0; }
    Real basePrimitive(Real y) const { return v0_ * std::max(0.0, y - x_start_); }

    /** Position reduced to [0, 2L] using oddness about 0 (sign) and the 4L period. */
    Real extendedVelocity(Real y) const
    {
        const Real period = 4.0 * length_;
        Real z = std::fmod(y, period);
        if (z < -2.0 * length_)
            z += period;
        else if (z >= 2.0 * length_)
            z -= period;
        const Real sign = z < 0.0 ? -1.0 : 1.0;
        z = std::abs(z);
        const Real mirrored = z <= length_ ? z : 2.0 * length_ - z;
        return sign * baseVelocity(mirrored);
    }

    /** Primitive of the extended velocity, even and 4L-periodic. */
    Real extendedPrimitive(Real y) const
    {
        const Real period = 4.0 * length_;
        Real z = std::fmod(y, period);
        if (z < -2.0 * length_)
            z += period;
        else if (z >= 2.0 * length_)
            z -= period;
        z = std::abs(z);
        if (z <= length_)
            return basePrimitive(z);
        return 2.0 * basePrimitive(length_) - basePrimitive(2.0 * length_ - z);
    }

    Real wave_speed_, length_, x_start_, v0_;
};

//=================================================================================================//
/**
 * Godunov finite-volume solver for rho v_t = sigma_x, sigma_t = E v_x at Courant number 1.
 * Records the tip interface velocity and its trapezoidal time integral.
 */
class CableFiniteVolume
{
  public:
    CableFiniteVolume(Index cells = 10000, Real youngs_modulus = 200.0e9, Real rho0 = 8000.0, Real length = 10.0,
                      Real x_start = 7.5, Real v0 = 5.0)
        : rho0_(rho0), youngs_modulus_(youngs_modulus), c_(std::sqrt(youngs_modulus / rho0)),
          impedance_(rho0 * c_), dx_(length / Real(cells)), v_(cells, 0.0), sigma_(cells, 0.0)
    {
        for (Index i = 0; i != cells; ++i)
            if ((i + 0.5) * dx_ >= x_start)
                v_[i] = v0;
    }

    Real timestep() const { return dx_ / c_; }

    /** Tip velocity and displacement at the requested times (linear interpolation between steps). */
    CableOracle::History tipHistory(std::span<const Real> times)
    {
        CableOracle::History out;
        Real t = 0.0, u = 0.0, tip = tipVelocity();
        const Real dt = timestep();
        for (Real target : times)
        {
            while (t + dt <= target + 1e-15 * dt)
            {
                step();
                const Real next = tipVelocity();
                u += 0.5 * dt * (tip + next);
                tip = next;
                t += dt;
            }
            // partial step by interpolation of the piecewise-linear record
            const Real remaining = target - t;
            if (remaining > 0.0)
            {
                CableFiniteVolume copy = *this;
                copy.step();
                const Real next = copy.tipVelocity();
                const Real weight = remaining / dt;
                const Real v_mid = tip + weight * (next - tip);
                out.velocity.push_back(v_mid);
                out.displacement.push_back(u + 0.5 * remaining * (tip + v_mid));
            }
            else
            {
                out.velocity.push_back(tip);
                out.displacement.push_back(u);
            }
        }
        return out;
    }

  private:
    /** Interface state from incoming characteristics v - sigma/Z (from the left) and v + sigma/Z. */
    void interfaceState(Real vL, Real sL, Real vR, Real sR, Real &v_star, Real &s_star) const
    {
        v_star = 0.5 * (vL + vR) + 0.5 * (sR - sL) / impedance_;
        s_star = 0.5 * (sL + sR) + 0.5 * impedance_ * (vR - vL);
    }

    Real tipVelocity() const
    {
        Real v_star, s_star;
        const Index n = v_.size();
        interfaceState(v_[n - 1], sigma_[n - 1], v_[n - 1], -sigma_[n - 1], v_star, s_star);
        return v_star;
    }

    void step()
    {
        const Index n = v_.size();
        std::vector<Real> v_face(n + 1), s_face(n + 1);
        interfaceState(-v_[0], sigma_[0], v_[0], sigma_[0], v_face[0], s_face[0]); // fixed wall
        for (Index f = 1; f < n; ++f)
            interfaceState(v_[f - 1], sigma_[f - 1], v_[f], sigma_[f], v_face[f], s_face[f]);
        interfaceState(v_[n - 1], sigma_[n - 1], v_[n - 1], -sigma_[n - 1], v_face[n], s_face[n]); // free end
        const Real dt = timestep();
        for (Index i = 0; i != n; ++i)
        {
            v_[i] += dt / (rho0_ * dx_) * (s_face[i + 1] - s_face[i]);
            sigma_[i] += youngs_modulus_ * dt / dx_ * (v_face[i + 1] - v_face[i]);
        }
    }

    Real rho0_, youngs_modulus_, c_, impedance_, dx_;
    std::vector<Real> v_, sigma_;
};

//=================================================================================================//
struct AffineMotionExpectation
{
    Matd F;
    Matd dF_dt;
};

/** Displacement u = A r0 + b gives F = I + A; velocity v = A r0 gives dF/dt = A. */
inline AffineMotionExpectation affine_motion_oracle(const Matd &A)
{
    return {Matd::Identity() + A, A};
}

/** Indices farther than `margin` from every face of the box [lower, upper]. */
inline std::vector<Index> interior_particles(std::span<const Vecd> positions, const Vecd &lower, const Vecd &upper,
                                             Real margin)
{
    std::vector<Index> interior;
    for (Index i = 0; i != positions.size(); ++i)
    {
        const Vecd &p = positions[i];
        if (((p - lower).array() > margin).all() && ((upper - p).array() > margin).all())
            interior.push_back(i);
    }
    return interior;
}

//=================================================================================================//
/** Neo-Hookean energy as a function of the Green-Lagrange strain; C = I + 2E, J = sqrt(det C). */
inline Real neo_hookean_energy_of_strain(const Matd &E, Real lambda, Real mu)
{
    const Matd C = Matd::Identity() + 2.0 * E;
    const Real log_J = 0.5 * std::log(C.determinant());
    return mu * E.trace() - mu * log_J + 0.5 * lambda * log_J * log_J;
}

/**
 * Second Piola-Kirchhoff stress by central differences of the neo-Hookean energy in E.
 * Off-diagonal components are perturbed symmetrically (E_ab and E_ba together).
 */
inline Matd energy_gradient_oracle(const Matd &F, Real lambda, Real mu, Real step = 1e-6)
{
    if (!(F.determinant() > 0.0))
        throw NumericalError("energy gradient oracle requires det F > 0");
    const Matd E = 0.5 * (F.transpose() * F - Matd::Identity());
    Matd S = Matd::Zero();
    for (int a = 0; a != 3; ++a)
        for (int b = a; b != 3; ++b)
        {
            Matd direction = Matd::Zero();
            direction(a, b) = 1.0;
            direction(b, a) = 1.0;
            const Real forward = neo_hookean_energy_of_strain(E + step * direction, lambda, mu);
            const Real backward = neo_hookean_energy_of_strain(E - step * direction, lambda, mu);
            // a symmetric perturbation of an off-diagonal pair changes W by 2 S_ab step
            const Real weight = a == b ? 2.0 * step : 4.0 * step;
            S(a, b) = S(b, a) = (forward - backward) / weight;
        }
    return S;
}

} // namespace tlsph

#pragma once

/**
 * @file materials.hpp
 * @brief Elastic constants, constitutive laws and the Kelvin-Voigt damping stress.
 *
 * All stresses are second Piola-Kirchhoff unless stated otherwise. The damping stress is
 *   S_D = pi/2 (dF/dt^T F + F^T dF/dt),  pi = alpha * rho0 * c * h,
 * i.e. the artificial viscosity pi times the rate of the Green-Lagrange strain.
 */

#include "common.hpp"

#include <cmath>
#include <string>

namespace tlsph
{
enum class ConstitutiveLaw
{
    LinearElastic,
    NeoHookean
};

inline std::string to_string(ConstitutiveLaw law)
{
    return law == ConstitutiveLaw::LinearElastic ? "linear_elastic" : "neo_hookean";
}

inline ConstitutiveLaw constitutive_law_from_string(const std::string &name)
{
    if (name == "linear_elastic")
        return ConstitutiveLaw::LinearElastic;
    if (name == "neo_hookean")
        return ConstitutiveLaw::NeoHookean;
    throw ConfigurationError("unknown constitutive law '" + name + "'");
}

struct ElasticConstants
{
    Real lambda;
    Real mu;
    Real bulk_modulus;  // K = lambda + 2 mu / 3
    Real shear_modulus; // G = mu
    Real sound_speed;   // c = sqrt(K / rho0)
    Real longitudinal_wave_speed; // sqrt((K + 4G/3) / rho0), fastest elastic signal
};

/** Lame parameters from Young's modulus and Poisson's ratio, E = 2G(1 + nu). */
inline ElasticConstants lame_from_E_nu(Real youngs_modulus, Real poisson_ratio, Real rho0)
{
    if (!(youngs_modulus > 0.0))
        throw ParameterError("Young's modulus must be positive");
    if (!(rho0 > 0.0))
        throw ParameterError("reference density must be positive");
    if (!(poisson_ratio > -1.0))
        throw ParameterError("Poisson's ratio must exceed -1");
    if (!(poisson_ratio < 0.5))
        throw ParameterError("Poisson's ratio must be below 0.5 (incompressible limit)");

    const Real E = youngs_modulus, nu = poisson_ratio;
    ElasticConstants k{};
    k.lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    k.mu = E / (2.0 * (1.0 + nu));
    k.bulk_modulus = k.lambda + 2.0 * k.mu / 3.0;
    k.shear_modulus = k.mu;
    k.sound_speed = std::sqrt(k.bulk_modulus / rho0);
    k.longitudinal_wave_speed = std::sqrt((k.bulk_modulus + 4.0 * k.shear_modulus / 3.0) / rho0);
    return k;
}

//=================================================================================================//
struct Material
{
    Real rho0 = 1.0;
    Real youngs_modulus = 1.0;
    Real poisson_ratio = 0.0;
    Real lambda = 0.0;
    Real mu = 0.0;
    Real bulk_modulus = 0.0;
    Real shear_modulus = 0.0;
    Real sound_speed = 0.0;
    Real longitudinal_wave_speed = 0.0;
    ConstitutiveLaw law = ConstitutiveLaw::LinearElastic;
    Real alpha = 0.5;
    bool damping_enabled = true;

    static Material make(Real rho0, Real youngs_modulus, Real poisson_ratio, ConstitutiveLaw law,
                         Real alpha = 0.5, bool damping_enabled = true)
    {
        if (!(alpha >= 0.0))
            throw ParameterError("damping scale alpha must be non-negative");
        const ElasticConstants k = lame_from_E_nu(youngs_modulus, poisson_ratio, rho0);
        Material m;
        m.rho0 = rho0;
        m.youngs_modulus = youngs_modulus;
        m.poisson_ratio = poisson_ratio;
        m.lambda = k.lambda;
        m.mu = k.mu;
        m.bulk_modulus = k.bulk_modulus;
        m.shear_modulus = k.shear_modulus;
        m.sound_speed = k.sound_speed;
        m.longitudinal_wave_speed = k.longitudinal_wave_speed;
        m.law = law;
        m.alpha = alpha;
        m.damping_enabled = damping_enabled;
        return m;
    }
};

//=================================================================================================//
inline Matd green_lagrange(const Matd &F)
{
    return 0.5 * (F.transpose() * F - Matd::Identity());
}

inline Matd linear_elastic_S(const Matd &strain, Real lambda, Real mu)
{
    return lambda * strain.trace() * Matd::Identity() + 2.0 * mu * strain;
}

/** S = mu (I - C^-1) + lambda ln(J) C^-1 with C = F^T F. */
inline Matd neo_hookean_S(const Matd &F, Real lambda, Real mu, Index particle = 0)
{
    const Real J = F.determinant();
    if (!(J > 0.0))
        throw ElementInversionError(particle, J);
    const Matd C_inv = (F.transpose() * F).inverse();
    const Matd S = mu * (Matd::Identity() - C_inv) + lambda * std::log(J) * C_inv;
    return 0.5 * (S + S.transpose());
}

inline Matd kv_damping_S(const Matd &F, const Matd &dF_dt, Real pi_coeff)
{
    if (pi_coeff < 0.0)
        throw ParameterError("damping coefficient must be non-negative");
    const Matd rate = dF_dt.transpose() * F;
    return 0.5 * pi_coeff * (rate + rate.transpose());
}

/** Artificial viscosity pi = alpha rho c h. */
inline Real damping_coefficient(Real rho0, Real sound_speed, Real h, Real alpha)
{
    return alpha * rho0 * sound_speed * h;
}

/** Coefficient actually used for a material; zero whenever damping is switched off. */
inline Real damping_coefficient(const Material &material, Real h)
{
    return material.damping_enabled ? damping_coefficient(material.rho0, material.sound_speed, h, material.alpha)
                                    : 0.0;
}

inline Matd first_pk(const Matd &F, const Matd &S_total) { return F * S_total; }

inline Matd elastic_S(const Material &material, const Matd &F, Index particle = 0)
{
    if (material.law == ConstitutiveLaw::NeoHookean)
        return neo_hookean_S(F, material.lambda, material.mu, particle);
    const Real J = F.determinant();
    if (!(J > 0.0))
        throw ElementInversionError(particle, J);
    return linear_elastic_S(green_lagrange(F), material.lambda, material.mu);
}

/** Elastic plus damping stress; the damping term is skipped entirely when pi_coeff == 0. */
inline Matd total_S(const Material &material, const Matd &F, const Matd &dF_dt, Real pi_coeff, Index particle = 0)
{
    Matd S = elastic_S(material, F, particle);
    if (pi_coeff != 0.0)
        S += kv_damping_S(F, dF_dt, pi_coeff);
    return S;
}

/**
 * Strain energy per unit reference volume. Neo-Hookean: mu tr(E) - mu ln J + lambda/2 (ln J)^2.
 * Linear elastic (Saint Venant-Kirchhoff): lambda/2 tr(E)^2 + mu E:E.
 */
inline Real strain_energy_density(const Material &material, const Matd &F)
{
    const Matd E = green_lagrange(F);
    if (material.law == ConstitutiveLaw::NeoHookean)
    {
        const Real log_J = std::log(F.determinant());
        return material.mu * E.trace() - material.mu * log_J + 0.5 * material.lambda * log_J * log_J;
    }
    const Real tr = E.trace();
    return 0.5 * material.lambda * tr * tr + material.mu * E.cwiseProduct(E).sum();
}

} // namespace tlsph

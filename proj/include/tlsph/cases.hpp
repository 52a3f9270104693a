#pragma once

/**
 * @file cases.hpp
 * @brief Benchmark presets, resolved run configuration (flat JSON) and case body construction.
 */

#include "common.hpp"
#include "geometry.hpp"
#include "materials.hpp"
#include "tlsph_core.hpp"

#include <json.hpp>

#include <cmath>
#include <iostream>
#include <set>
#include <string>

namespace tlsph
{
inline const std::vector<std::string> &case_ids()
{
    static const std::vector<std::string> ids = {"cable", "bending", "twisting", "stl"};
    return ids;
}

/** Fully resolved run parameters. Every field is serialized to the run manifest. */
struct SimulationConfig
{
    std::string case_id = "cable";
    Real dp = 0.05;
    Real smoothing_ratio = 1.15; // h = smoothing_ratio * dp
    Real cfl = 0.6;
    Real t_end = 0.004;
    Vecd gravity = Vecd::Zero();
    Real probe_interval = 1.0e-5;
    Real snapshot_interval = 5.0e-4;

    Real rho0 = 8000.0;
    Real youngs_modulus = 200.0e9;
    Real poisson_ratio = 0.0;
    ConstitutiveLaw law = ConstitutiveLaw::LinearElastic;
    Real alpha = 0.5;

    Real omega0 = 105.0;
    Real column_length = 6.0;
    std::string stl_path;
    int stl_axis = 2;
    Real band_speed = 5.0;

    int threads = 1;

    Real h() const { return smoothing_ratio * dp; }
    Material material() const { return Material::make(rho0, youngs_modulus, poisson_ratio, law, alpha, true); }
};

/** Default parameters of each benchmark. End times of the columns are placeholders. */
inline SimulationConfig preset_config(const std::string &case_id)
{
    SimulationConfig c;
    c.case_id = case_id;
    if (case_id == "cable")
        return c;
    if (case_id == "bending")
    {
        c.dp = 0.125;
        c.t_end = 1.0;
        c.probe_interval = 1.0e-3;
        c.snapshot_interval = 0.05;
        c.rho0 = 1100.0;
        c.youngs_modulus = 1.7e7;
        c.poisson_ratio = 0.45;
        c.law = ConstitutiveLaw::NeoHookean;
        return c;
    }
    if (case_id == "twisting")
    {
        c.dp = 0.125;
        c.t_end = 0.3;
        c.probe_interval = 2.0e-4;
        c.snapshot_interval = 0.02;
        c.rho0 = 1100.0;
        c.youngs_modulus = 0.017e9;
        c.poisson_ratio = 0.4995;
        c.law = ConstitutiveLaw::NeoHookean;
        return c;
    }
    if (case_id == "stl")
    {
        c.dp = 0.05;
        c.t_end = 0.02;
        c.probe_interval = 2.0e-4;
        c.snapshot_interval = 0.005;
        c.rho0 = 1100.0;
        c.youngs_modulus = 0.017e9;
        c.poisson_ratio = 0.45;
        c.law = ConstitutiveLaw::NeoHookean;
        return c;
    }
    throw ConfigurationError("unknown case '" + case_id + "'");
}

inline void validate(const SimulationConfig &c)
{
    auto require = [](bool ok, const std::string &what) {
        if (!ok)
            throw ConfigurationError(what);
    };
    require(std::find(case_ids().begin(), case_ids().end(), c.case_id) != case_ids().end(),
            "unknown case '" + c.case_id + "'");
    require(c.dp > 0.0 && std::isfinite(c.dp), "dp must be positive");
    require(c.smoothing_ratio > 0.0 && std::isfinite(c.smoothing_ratio), "smoothing_ratio must be positive");
    require(c.cfl > 0.0 && c.cfl <= 1.0, "cfl must lie in (0, 1]");
    require(c.t_end >= 0.0 && std::isfinite(c.t_end), "t_end must be non-negative");
    require(c.probe_interval > 0.0 && std::isfinite(c.probe_interval), "probe_interval must be positive");
    require(c.snapshot_interval > 0.0 && std::isfinite(c.snapshot_interval), "snapshot_interval must be positive");
    require(c.alpha >= 0.0 && std::isfinite(c.alpha), "alpha must be non-negative");
    require(c.gravity.allFinite(), "gravity must be finite");
    require(c.stl_axis >= 0 && c.stl_axis < 3, "stl_axis must be 0, 1 or 2");
    require(c.threads >= 1, "threads must be at least 1");
    if (c.case_id == "twisting")
        require(c.omega0 > 0.0 && std::isfinite(c.omega0) && c.column_length > 0.0,
                "twisting requires positive omega0 and column_length");
    if (c.case_id == "stl")
        require(!c.stl_path.empty(), "the stl case requires an STL path");
    try
    {
        (void)c.material();
    }
    catch (const ParameterError &e)
    {
        throw ConfigurationError(e.what());
    }
}

//=================================================================================================//
// Flat JSON round trip
//=================================================================================================//
inline nlohmann::ordered_json to_json(const SimulationConfig &c)
{
    nlohmann::ordered_json j;
    j["case"] = c.case_id;
    j["dp"] = c.dp;
    j["smoothing_ratio"] = c.smoothing_ratio;
    j["cfl"] = c.cfl;
    j["t_end"] = c.t_end;
    j["gravity_x"] = c.gravity[0];
    j["gravity_y"] = c.gravity[1];
    j["gravity_z"] = c.gravity[2];
    j["probe_interval"] = c.probe_interval;
    j["snapshot_interval"] = c.snapshot_interval;
    j["rho0"] = c.rho0;
    j["youngs_modulus"] = c.youngs_modulus;
    j["poisson_ratio"] = c.poisson_ratio;
    j["law"] = to_string(c.law);
    j["alpha"] = c.alpha;
    j["omega0"] = c.omega0;
    j["column_length"] = c.column_length;
    j["stl"] = c.stl_path;
    j["stl_axis"] = c.stl_axis;
    j["band_speed"] = c.band_speed;
    j["threads"] = c.threads;
    return j;
}

/** Derived quantities written to manifests; accepted and ignored on input. */
inline const std::set<std::string> &derived_keys()
{
    static const std::set<std::string> keys = {"h", "lambda", "mu", "bulk_modulus", "sound_speed",
                                               "damping_coefficient"};
    return keys;
}

/** Overrides fields of `c` from a flat JSON object. Unknown keys are rejected. */
inline void apply_json(SimulationConfig &c, const nlohmann::json &j)
{
    if (!j.is_object())
        throw ConfigurationError("config document must be a JSON object");
    try
    {
        for (const auto &[key, value] : j.items())
        {
            if (key == "case")
                c.case_id = value.get<std::string>();
            else if (key == "dp")
                c.dp = value.get<Real>();
            else if (key == "smoothing_ratio")
                c.smoothing_ratio = value.get<Real>();
            else if (key == "cfl")
                c.cfl = value.get<Real>();
            else if (key == "t_end")
                c.t_end = value.get<Real>();
            else if (key == "gravity_x")
                c.gravity[0] = value.get<Real>();
            else if (key == "gravity_y")
                c.gravity[1] = value.get<Real>();
            else if (key == "gravity_z")
                c.gravity[2] = value.get<Real>();
            else if (key == "probe_interval")
                c.probe_interval = value.get<Real>();
            else if (key == "snapshot_interval")
                c.snapshot_interval = value.get<Real>();
            else if (key == "rho0")
                c.rho0 = value.get<Real>();
            else if (key == "youngs_modulus")
                c.youngs_modulus = value.get<Real>();
            else if (key == "poisson_ratio")
                c.poisson_ratio = value.get<Real>();
            else if (key == "law")
                c.law = constitutive_law_from_string(value.get<std::string>());
            else if (key == "alpha")
                c.alpha = value.get<Real>();
            else if (key == "omega0")
                c.omega0 = value.get<Real>();
            else if (key == "column_length")
                c.column_length = value.get<Real>();
            else if (key == "stl")
                c.stl_path = value.get<std::string>();
            else if (key == "stl_axis")
                c.stl_axis = value.get<int>();
            else if (key == "band_speed")
                c.band_speed = value.get<Real>();
            else if (key == "threads")
                c.threads = value.get<int>();
            else if (!derived_keys().contains(key))
                throw ConfigurationError("unknown config key '" + key + "'");
        }
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ConfigurationError(std::string("invalid config value: ") + e.what());
    }
}

/** Resolved configuration plus derived constants. */
inline nlohmann::ordered_json run_manifest(const SimulationConfig &c)
{
    nlohmann::ordered_json j = to_json(c);
    const Material m = c.material();
    j["h"] = c.h();
    j["lambda"] = m.lambda;
    j["mu"] = m.mu;
    j["bulk_modulus"] = m.bulk_modulus;
    j["sound_speed"] = m.sound_speed;
    j["damping_coefficient"] = damping_coefficient(m, c.h());
    return j;
}

//=================================================================================================//
struct ProbeDefinition
{
    std::string name;
    Vecd point;
};

/** Particles, constraints, initial velocities and probes of a case at a resolution. */
struct CaseBody
{
    ParticleSystem system;
    std::vector<ProbeDefinition> probes;
    Index clamped = 0;
    Index prescribed = 0;
};

namespace detail
{
inline Index tag_region(ParticleSystem &system, const BodyRegion &region, Constraint constraint,
                        Index motion_group = 0)
{
    const auto selected = region.select(system.r0);
    if (selected.empty())
        throw ConfigurationError("constraint region selects no particles");
    for (Index i : selected)
    {
        system.constraint[i] = constraint;
        system.motion_group[i] = motion_group;
    }
    return selected.size();
}
} // namespace detail

inline CaseBody build_case_body(const SimulationConfig &c)
{
    validate(c);
    const Real h = c.h();
    const Real clamp = 2.0 * h;
    const Real big = 1.0e30;
    CaseBody out;
    LatticeBody body;
    VelocityFieldParameters velocity_params;
    velocity_params.omega0 = c.omega0;
    velocity_params.column_length = c.column_length;

    if (c.case_id == "cable")
    {
        body = generate_lattice_box(Vecd(10.0, 0.2, 0.2), c.dp);
        out.system = ParticleSystem(body.positions, body.volumes, c.rho0);
        out.clamped = detail::tag_region(out.system, BodyRegion::box(Vecd::Constant(-big), Vecd(clamp, big, big)),
                                         Constraint::Clamped);
        out.probes = {{"tip", Vecd(10.0, 0.1, 0.1)}};
    }
    else if (c.case_id == "bending")
    {
        body = generate_lattice_box(Vecd(1.0, 1.0, 6.0), c.dp);
        out.system = ParticleSystem(body.positions, body.volumes, c.rho0);
        out.clamped = detail::tag_region(out.system, BodyRegion::box(Vecd::Constant(-big), Vecd(big, big, clamp)),
                                         Constraint::Clamped);
        out.probes = {{"point_s", Vecd(1.0, 1.0, 6.0)}};
    }
    else if (c.case_id == "twisting")
    {
        body = generate_lattice_box(Vecd(1.0, c.column_length, 1.0), c.dp, Vecd(-0.5, 0.0, -0.5));
        out.system = ParticleSystem(body.positions, body.volumes, c.rho0);
        out.clamped = detail::tag_region(out.system, BodyRegion::box(Vecd::Constant(-big), Vecd(big, clamp, big)),
                                         Constraint::Clamped);
        out.probes = {{"free_end_center", Vecd(0.0, c.column_length, 0.0)}};
    }
    else
    {
        const StlParseResult parsed = read_stl_file(c.stl_path);
        if (parsed.degenerate_dropped > 0)
            std::cerr << "warning: dropped " << parsed.degenerate_dropped << " degenerate triangles\n";
        body = fill_mesh_with_lattice(parsed.mesh, c.dp);
        if (body.positions.empty())
            throw ConfigurationError("STL fill produced no particles at dp = " + std::to_string(c.dp));
        if (thin_feature_fraction(body.positions, c.dp) > 0.05)
            std::cerr << "warning: features thinner than 3 particles detected; refine dp\n";
        out.system = ParticleSystem(body.positions, body.volumes, c.rho0);

        const auto [lower, upper] = parsed.mesh.bounds();
        const int axis = c.stl_axis;
        velocity_params.band_axis = axis;
        velocity_params.band_bottom = lower[axis] + clamp;
        velocity_params.band_top = upper[axis] - clamp;
        velocity_params.band_speed = c.band_speed;
        const Real speed = c.band_speed;
        Vecd unit = Vecd::Zero();
        unit[axis] = 1.0;
        const Index up = out.system.addMotion([unit, speed](Real, const Vecd &) { return Vecd(speed * unit); });
        const Index down = out.system.addMotion([unit, speed](Real, const Vecd &) { return Vecd(-speed * unit); });
        out.prescribed = detail::tag_region(out.system, BodyRegion::halfSpace(unit, velocity_params.band_top),
                                            Constraint::Prescribed, up);
        out.prescribed += detail::tag_region(out.system, BodyRegion::halfSpace(-unit, -velocity_params.band_bottom),
                                             Constraint::Prescribed, down);
        out.probes = {{"center", Vecd(0.5 * (lower + upper))}};
    }

    out.system.v = initial_velocity_field(c.case_id, out.system.r0, velocity_params);
    apply_constraints(out.system, 0.0);
    return out;
}

} // namespace tlsph

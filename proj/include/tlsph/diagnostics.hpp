#pragma once

/**
 * @file diagnostics.hpp
 * @brief Derived stress measures, probes, conservation sums and CSV / legacy VTK output.
 */

#include "common.hpp"
#include "materials.hpp"
#include "tlsph_core.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

namespace tlsph
{
/** Push-forward sigma = J^-1 F S F^T. */
inline Matd cauchy_stress(const Matd &F, const Matd &S)
{
    const Real J = F.determinant();
    if (!(J > 0.0))
        throw NumericalError("Cauchy stress undefined for det F = " + std::to_string(J));
    const Matd sigma = (F * S * F.transpose()) / J;
    return 0.5 * (sigma + sigma.transpose());
}

inline Real von_mises(const Matd &sigma)
{
    const Matd deviatoric = sigma - (sigma.trace() / 3.0) * Matd::Identity();
    return std::sqrt(1.5 * deviatoric.cwiseProduct(deviatoric).sum());
}

/** Total variation sum_k |x_{k+1} - x_k|. */
inline Real oscillation_metric(std::span<const Real> series)
{
    if (series.size() < 2)
        throw ParameterError("oscillation metric needs at least two samples");
    Real total = 0.0;
    for (Index k = 0; k + 1 < series.size(); ++k)
        total += std::abs(series[k + 1] - series[k]);
    return total;
}

//=================================================================================================//
/** Lagrangian probe bound to the particle nearest to a requested reference point. */
struct ProbeSeries
{
    std::string name;
    Index particle = 0;
    std::vector<Real> times;
    std::vector<Vecd> values;

    void record(Real time, const Vecd &value)
    {
        if (!times.empty() && !(time > times.back()))
            throw ParameterError("probe '" + name + "' samples must have strictly increasing times");
        times.push_back(time);
        values.push_back(value);
    }

    std::vector<Real> component(int axis) const
    {
        std::vector<Real> out;
        out.reserve(values.size());
        for (const Vecd &v : values)
            out.push_back(v[axis]);
        return out;
    }
};

/** Index of the particle nearest to `point`; ties go to the lowest index. */
inline Index nearest_particle(std::span<const Vecd> positions, const Vecd &point)
{
    if (positions.empty())
        throw ConfigurationError("cannot bind a probe on an empty body");
    Index best = 0;
    Real best_distance = std::numeric_limits<Real>::max();
    for (Index i = 0; i != positions.size(); ++i)
    {
        const Real d = (positions[i] - point).squaredNorm();
        if (d < best_distance)
        {
            best_distance = d;
            best = i;
        }
    }
    return best;
}

//=================================================================================================//
struct ConservationReport
{
    Real time = 0.0;
    Real mass = 0.0;
    Vecd momentum = Vecd::Zero();
    Real kinetic_energy = 0.0;
    Real strain_energy = 0.0;

    Real mechanicalEnergy() const { return kinetic_energy + strain_energy; }
};

/** Fixed-order sums over the particles; strain energy is sum V0 W(F). */
inline ConservationReport conservation_report(const ParticleSystem &system, const Material &material, Real time = 0.0)
{
    ConservationReport report;
    report.time = time;
    for (Index i = 0; i != system.size(); ++i)
    {
        report.mass += system.mass[i];
        report.momentum += system.mass[i] * system.v[i];
        report.kinetic_energy += 0.5 * system.mass[i] * system.v[i].squaredNorm();
        report.strain_energy += system.V0[i] * strain_energy_density(material, system.F[i]);
    }
    return report;
}

//=================================================================================================//
struct Snapshot
{
    Real time = 0.0;
    std::vector<Vecd> position, velocity, displacement;
    std::vector<Real> von_mises, det_F;
};

inline Snapshot make_snapshot(const ParticleSystem &system, Real time)
{
    Snapshot snap;
    snap.time = time;
    const Index n = system.size();
    snap.position = system.r;
    snap.velocity = system.v;
    snap.displacement.resize(n);
    snap.von_mises.resize(n);
    snap.det_F.resize(n);
    for (Index i = 0; i != n; ++i)
    {
        snap.displacement[i] = system.displacement(i);
        snap.det_F[i] = system.F[i].determinant();
        snap.von_mises[i] = snap.det_F[i] > 0.0 ? von_mises(cauchy_stress(system.F[i], system.S[i]))
                                                : std::numeric_limits<Real>::quiet_NaN();
    }
    return snap;
}

namespace detail
{
inline std::string format_real(Real value)
{
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
    return std::string(buffer, result.ptr);
}

inline std::ofstream open_for_writing(const std::filesystem::path &path)
{
    if (path.has_parent_path())
    {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}
} // namespace detail

/** Legacy ASCII POLYDATA with one vertex cell per particle. */
inline void write_vtk_snapshot(const Snapshot &snap, const std::filesystem::path &path)
{
    std::ofstream out = detail::open_for_writing(path);
    const Index n = snap.position.size();
    auto f = detail::format_real;
    out << "# vtk DataFile Version 3.0\n"
        << "tlsph snapshot t=" << f(snap.time) << "\n"
        << "ASCII\n"
        << "DATASET POLYDATA\n"
        << "POINTS " << n << " double\n";
    for (const Vecd &p : snap.position)
        out << f(p[0]) << ' ' << f(p[1]) << ' ' << f(p[2]) << '\n';
    out << "VERTICES " << n << ' ' << 2 * n << '\n';
    for (Index i = 0; i != n; ++i)
        out << "1 " << i << '\n';
    out << "POINT_DATA " << n << '\n';
    auto vectors = [&](const char *name, const std::vector<Vecd> &data) {
        out << "VECTORS " << name << " double\n";
        for (const Vecd &v : data)
            out << f(v[0]) << ' ' << f(v[1]) << ' ' << f(v[2]) << '\n';
    };
    auto scalars = [&](const char *name, const std::vector<Real> &data) {
        out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (Real s : data)
            out << f(s) << '\n';
    };
    vectors("velocity", snap.velocity);
    vectors("displacement", snap.displacement);
    scalars("von_mises", snap.von_mises);
    scalars("det_F", snap.det_F);
    if (!out)
        throw IoError("failed writing '" + path.string() + "'");
}

/** CSV with header time,x,y,z and 17 significant digits. */
inline void write_csv_series(const ProbeSeries &series, const std::filesystem::path &path)
{
    std::ofstream out = detail::open_for_writing(path);
    out << "time,x,y,z\n";
    for (Index k = 0; k != series.times.size(); ++k)
    {
        const Vecd &v = series.values[k];
        out << detail::format_real(series.times[k]) << ',' << detail::format_real(v[0]) << ','
            << detail::format_real(v[1]) << ',' << detail::format_real(v[2]) << '\n';
    }
    if (!out)
        throw IoError("failed writing '" + path.string() + "'");
}

inline ProbeSeries read_csv_series(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path.string() + "'");
    ProbeSeries series;
    series.name = path.stem().string();
    std::string line;
    std::getline(in, line);
    if (line != "time,x,y,z")
        throw ParseError("unexpected CSV header in '" + path.string() + "'");
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        std::array<Real, 4> row{};
        const char *cursor = line.data();
        const char *end = line.data() + line.size();
        for (int c = 0; c != 4; ++c)
        {
            const auto result = std::from_chars(cursor, end, row[c]);
            if (result.ec != std::errc())
                throw ParseError("malformed CSV row in '" + path.string() + "': " + line);
            cursor = result.ptr + (c < 3 ? 1 : 0);
        }
        series.times.push_back(row[0]);
        series.values.emplace_back(row[1], row[2], row[3]);
    }
    return series;
}

inline void write_conservation_csv(const std::vector<ConservationReport> &reports, const std::filesystem::path &path)
{
    std::ofstream out = detail::open_for_writing(path);
    auto f = detail::format_real;
    out << "time,mass,momentum_x,momentum_y,momentum_z,kinetic_energy,strain_energy,mechanical_energy\n";
    for (const auto &r : reports)
        out << f(r.time) << ',' << f(r.mass) << ',' << f(r.momentum[0]) << ',' << f(r.momentum[1]) << ','
            << f(r.momentum[2]) << ',' << f(r.kinetic_energy) << ',' << f(r.strain_energy) << ','
            << f(r.mechanicalEnergy()) << '\n';
    if (!out)
        throw IoError("failed writing '" + path.string() + "'");
}

} // namespace tlsph

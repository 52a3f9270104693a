#pragma once

/**
 * @file geometry.hpp
 * @brief Particle generation: lattice boxes, STL ingestion, ray-parity lattice fill,
 *        body regions and initial velocity fields.
 */

#include "common.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace tlsph
{
//=================================================================================================//
struct LatticeBody
{
    std::vector<Vecd> positions;
    std::vector<Real> volumes;
};

/** Cell-centered lattice filling [origin, origin + extents]; round(extent/dp) particles per axis. */
inline LatticeBody generate_lattice_box(const Vecd &extents, Real dp, const Vecd &origin = Vecd::Zero())
{
    if (!(dp > 0.0) || !std::isfinite(dp))
        throw ParameterError("lattice spacing must be positive");
    std::array<Index, 3> count{};
    for (int d = 0; d != 3; ++d)
    {
        if (!(extents[d] > 0.0))
            throw ParameterError("box extents must be positive");
        if (dp > extents[d] * (1.0 + 1e-12))
            throw ParameterError("lattice spacing " + std::to_string(dp) + " exceeds box extent " +
                                 std::to_string(extents[d]));
        count[d] = static_cast<Index>(std::llround(extents[d] / dp));
    }
    LatticeBody body;
    const Index total = count[0] * count[1] * count[2];
    body.positions.reserve(total);
    for (Index k = 0; k != count[2]; ++k)
        for (Index j = 0; j != count[1]; ++j)
            for (Index i = 0; i != count[0]; ++i)
                body.positions.push_back(origin + dp * Vecd(i + 0.5, j + 0.5, k + 0.5));
    body.volumes.assign(total, dp * dp * dp);
    return body;
}

//=================================================================================================//
/** Triangle soup as read from STL: three vertices per triangle, normals from the winding. */
struct TriangleMesh
{
    std::vector<Vecd> vertices;
    std::vector<std::array<Index, 3>> triangles;
    std::vector<Vecd> normals;

    Index size() const { return triangles.size(); }

    void addTriangle(const Vecd &a, const Vecd &b, const Vecd &c)
    {
        const Index base = vertices.size();
        vertices.push_back(a);
        vertices.push_back(b);
        vertices.push_back(c);
        triangles.push_back({base, base + 1, base + 2});
        const Vecd n = (b - a).cross(c - a);
        const Real norm = n.norm();
        normals.push_back(norm > 0.0 ? Vecd(n / norm) : Vecd::Zero());
    }

    Vecd vertex(Index triangle, int corner) const { return vertices[triangles[triangle][corner]]; }

    std::pair<Vecd, Vecd> bounds() const
    {
        Vecd lower = Vecd::Constant(std::numeric_limits<Real>::max());
        Vecd upper = Vecd::Constant(std::numeric_limits<Real>::lowest());
        for (const Vecd &p : vertices)
        {
            lower = lower.cwiseMin(p);
            upper = upper.cwiseMax(p);
        }
        return {lower, upper};
    }
};

struct StlParseResult
{
    TriangleMesh mesh;
    Index degenerate_dropped = 0;
};

namespace detail
{
template <typename T>
T read_le(const unsigned char *bytes)
{
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
    {
        auto *raw = reinterpret_cast<unsigned char *>(&value);
        std::reverse(raw, raw + sizeof(T));
    }
    return value;
}

template <typename T>
void write_le(std::string &out, T value)
{
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(raw, raw + sizeof(T));
    out.append(reinterpret_cast<const char *>(raw), sizeof(T));
}

inline bool is_degenerate(const Vecd &a, const Vecd &b, const Vecd &c)
{
    return !((b - a).cross(c - a).norm() > 0.0);
}

inline StlParseResult parse_stl_binary(std::string_view bytes)
{
    if (bytes.size() < 84)
        throw ParseError("binary STL truncated in header at byte offset " + std::to_string(bytes.size()));
    const auto *data = reinterpret_cast<const unsigned char *>(bytes.data());
    const auto count = read_le<std::uint32_t>(data + 80);
    StlParseResult result;
    for (std::uint32_t t = 0; t != count; ++t)
    {
        const std::size_t offset = 84 + std::size_t(t) * 50;
        if (offset + 50 > bytes.size())
            throw ParseError("binary STL truncated: triangle " + std::to_string(t) + " of " +
                             std::to_string(count) + " incomplete at byte offset " + std::to_string(offset));
        std::array<Vecd, 3> corner;
        for (int c = 0; c != 3; ++c)
            for (int d = 0; d != 3; ++d)
                corner[c][d] = read_le<float>(data + offset + 12 + 12 * c + 4 * d);
        for (const Vecd &p : corner)
            if (!is_finite(p))
                throw ParseError("non-finite vertex in binary STL at byte offset " + std::to_string(offset));
        if (is_degenerate(corner[0], corner[1], corner[2]))
            ++result.degenerate_dropped;
        else
            result.mesh.addTriangle(corner[0], corner[1], corner[2]);
    }
    return result;
}

inline StlParseResult parse_stl_ascii(std::string_view text)
{
    StlParseResult result;
    std::istringstream stream{std::string(text)};
    std::string line;
    std::size_t line_number = 0;
    enum class State
    {
        Solid,
        Body,
        Facet,
        Loop,
        EndLoop,
        EndFacet,
        Done
    } state = State::Solid;
    std::vector<Vecd> corners;
    auto fail = [&](const std::string &what) {
        throw ParseError("ASCII STL line " + std::to_string(line_number) + ": " + what);
    };

    while (std::getline(stream, line))
    {
        ++line_number;
        std::istringstream words(line);
        std::string keyword;
        if (!(words >> keyword))
            continue;
        switch (state)
        {
        case State::Solid:
            if (keyword != "solid")
                fail("expected 'solid', found '" + keyword + "'");
            state = State::Body;
            break;
        case State::Body:
            if (keyword == "endsolid")
                state = State::Done;
            else if (keyword == "facet")
                state = State::Facet;
            else
                fail("expected 'facet' or 'endsolid', found '" + keyword + "'");
            break;
        case State::Facet:
        {
            std::string loop;
            if (keyword != "outer" || !(words >> loop) || loop != "loop")
                fail("expected 'outer loop'");
            corners.clear();
            state = State::Loop;
            break;
        }
        case State::Loop:
            if (keyword == "vertex")
            {
                Vecd p;
                if (!(words >> p[0] >> p[1] >> p[2]) || !is_finite(p))
                    fail("malformed vertex");
                corners.push_back(p);
                if (corners.size() == 3)
                    state = State::EndLoop;
            }
            else
                fail("expected 'vertex', found '" + keyword + "'");
            break;
        case State::EndLoop:
            if (keyword != "endloop")
                fail("expected 'endloop', found '" + keyword + "'");
            state = State::EndFacet;
            break;
        case State::EndFacet:
            if (keyword != "endfacet")
                fail("expected 'endfacet', found '" + keyword + "'");
            if (is_degenerate(corners[0], corners[1], corners[2]))
                ++result.degenerate_dropped;
            else
                result.mesh.addTriangle(corners[0], corners[1], corners[2]);
            state = State::Body;
            break;
        case State::Done:
            fail("content after 'endsolid'");
        }
    }
    if (state != State::Done)
        fail("unexpected end of file");
    return result;
}
} // namespace detail

/**
 * Parses ASCII or binary STL. A payload whose size matches 84 + 50 * count is binary even if
 * the header happens to start with "solid".
 */
inline StlParseResult parse_stl(std::string_view bytes)
{
    if (bytes.empty())
        throw ParseError("empty STL input");
    if (bytes.size() >= 84)
    {
        const auto count = detail::read_le<std::uint32_t>(reinterpret_cast<const unsigned char *>(bytes.data()) + 80);
        if (bytes.size() == 84 + std::size_t(count) * 50)
            return detail::parse_stl_binary(bytes);
    }
    std::size_t first = bytes.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos && bytes.substr(first, 5) == "solid")
        return detail::parse_stl_ascii(bytes);
    return detail::parse_stl_binary(bytes);
}

inline StlParseResult read_stl_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open STL file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_stl(buffer.str());
}

inline std::string serialize_stl_binary(const TriangleMesh &mesh, std::string_view header = "tlsph binary stl")
{
    std::string out(80, '\0');
    std::copy_n(header.begin(), std::min<std::size_t>(header.size(), 80), out.begin());
    detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(mesh.size()));
    for (Index t = 0; t != mesh.size(); ++t)
    {
        for (int d = 0; d != 3; ++d)
            detail::write_le<float>(out, static_cast<float>(mesh.normals[t][d]));
        for (int c = 0; c != 3; ++c)
            for (int d = 0; d != 3; ++d)
                detail::write_le<float>(out, static_cast<float>(mesh.vertex(t, c)[d]));
        detail::write_le<std::uint16_t>(out, 0);
    }
    return out;
}

inline std::string serialize_stl_ascii(const TriangleMesh &mesh, const std::string &name = "tlsph")
{
    std::ostringstream out;
    out.precision(17); // exact decimal of the float-rounded value, so ASCII and binary agree
    out << "solid " << name << '\n';
    for (Index t = 0; t != mesh.size(); ++t)
    {
        const Vecd n = mesh.normals[t].cast<float>().cast<Real>();
        out << "  facet normal " << n[0] << ' ' << n[1] << ' ' << n[2] << '\n' << "    outer loop\n";
        for (int c = 0; c != 3; ++c)
        {
            const Vecd p = mesh.vertex(t, c).cast<float>().cast<Real>();
            out << "      vertex " << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
        }
        out << "    endloop\n  endfacet\n";
    }
    out << "endsolid " << name << '\n';
    return out.str();
}

inline void write_stl_file(const TriangleMesh &mesh, const std::string &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write STL file '" + path + "'");
    out << serialize_stl_binary(mesh);
}

//=================================================================================================//
// Ray-parity inside test
//=================================================================================================//
namespace detail
{
enum class RayHit
{
    Miss,
    Hit,
    Grazing
};

/** Moller-Trumbore; hits near an edge, vertex or the ray origin are reported as grazing. */
inline RayHit intersect_ray(const Vecd &origin, const Vecd &direction, const Vecd &a, const Vecd &b, const Vecd &c,
                            Real scale)
{
    constexpr Real edge_eps = 1e-9;
    const Vecd e1 = b - a, e2 = c - a;
    const Vecd p = direction.cross(e2);
    const Real det = e1.dot(p);
    if (std::abs(det) < 1e-14 * e1.norm() * e2.norm())
        return RayHit::Miss;
    const Real inv_det = 1.0 / det;
    const Vecd s = origin - a;
    const Real u = s.dot(p) * inv_det;
    if (u < -edge_eps || u > 1.0 + edge_eps)
        return RayHit::Miss;
    const Vecd q = s.cross(e1);
    const Real v = direction.dot(q) * inv_det;
    if (v < -edge_eps || u + v > 1.0 + edge_eps)
        return RayHit::Miss;
    const Real t = e2.dot(q) * inv_det;
    if (t < -edge_eps * scale)
        return RayHit::Miss;
    if (u < edge_eps || v < edge_eps || u + v > 1.0 - edge_eps || t < edge_eps * scale)
        return RayHit::Grazing;
    return RayHit::Hit;
}

/** Triangles binned on the plane transverse to a dominant ray axis. */
class TransverseBins
{
  public:
    TransverseBins(const TriangleMesh &mesh, int axis) : mesh_(mesh), axis_(axis)
    {
        b_ = (axis + 1) % 3;
        c_ = (axis + 2) % 3;
        const auto [lower, upper] = mesh.bounds();
        lower_ = {lower[b_], lower[c_]};
        const Index per_axis = std::max<Index>(1, static_cast<Index>(std::sqrt(Real(mesh.size()))));
        bins_ = per_axis;
        size_ = {std::max(upper[b_] - lower[b_], 1e-12) / per_axis, std::max(upper[c_] - lower[c_], 1e-12) / per_axis};
        cells_.assign(bins_ * bins_, {});
        for (Index t = 0; t != mesh.size(); ++t)
        {
            Real lo_b = std::numeric_limits<Real>::max(), hi_b = std::numeric_limits<Real>::lowest();
            Real lo_c = lo_b, hi_c = hi_b;
            for (int k = 0; k != 3; ++k)
            {
                const Vecd p = mesh.vertex(t, k);
                lo_b = std::min(lo_b, p[b_]);
                hi_b = std::max(hi_b, p[b_]);
                lo_c = std::min(lo_c, p[c_]);
                hi_c = std::max(hi_c, p[c_]);
            }
            const auto [ib0, ib1] = range(lo_b, hi_b, 0);
            const auto [ic0, ic1] = range(lo_c, hi_c, 1);
            for (Index ic = ic0; ic <= ic1; ++ic)
                for (Index ib = ib0; ib <= ib1; ++ib)
                    cells_[ic * bins_ + ib].push_back(t);
        }
    }

    /** Number of hits along the ray, or -1 if any hit is grazing. */
    long countCrossings(const Vecd &origin, const Vecd &direction, Real axis_length, Real scale) const
    {
        const Real travel = axis_length / std::abs(direction[axis_]);
        const Real end_b = origin[b_] + travel * direction[b_];
        const Real end_c = origin[c_] + travel * direction[c_];
        const auto [ib0, ib1] = range(std::min(origin[b_], end_b), std::max(origin[b_], end_b), 0);
        const auto [ic0, ic1] = range(std::min(origin[c_], end_c), std::max(origin[c_], end_c), 1);
        long crossings = 0;
        stamp_.assign(mesh_.size(), false);
        for (Index ic = ic0; ic <= ic1; ++ic)
            for (Index ib = ib0; ib <= ib1; ++ib)
                for (Index t : cells_[ic * bins_ + ib])
                {
                    if (stamp_[t])
                        continue;
                    stamp_[t] = true;
                    const RayHit hit =
                        intersect_ray(origin, direction, mesh_.vertex(t, 0), mesh_.vertex(t, 1), mesh_.vertex(t, 2), scale);
                    if (hit == RayHit::Grazing)
                        return -1;
                    if (hit == RayHit::Hit)
                        ++crossings;
                }
        return crossings;
    }

  private:
    std::pair<Index, Index> range(Real lo, Real hi, int which) const
    {
        auto clamp = [&](Real x) {
            const Real cell = std::floor((x - lower_[which]) / size_[which]);
            return static_cast<Index>(std::clamp<Real>(cell, 0.0, Real(bins_ - 1)));
        };
        return {clamp(lo), clamp(hi)};
    }

    const TriangleMesh &mesh_;
    int axis_, b_ = 1, c_ = 2;
    std::array<Real, 2> lower_{}, size_{};
    Index bins_ = 1;
    std::vector<std::vector<Index>> cells_;
    mutable std::vector<bool> stamp_;
};
} // namespace detail

struct FillOptions
{
    /** Fraction of candidate points allowed to disagree between the three ray directions. */
    Real max_inconsistent_fraction = 0.01;
    int max_jitter_retries = 8;
};

/**
 * Keeps cell-centered lattice points of the mesh bounding box whose ray along a fixed, slightly
 * tilted +x direction crosses the surface an odd number of times. Parity along two further
 * directions is checked; widespread disagreement means the mesh is not closed.
 */
inline LatticeBody fill_mesh_with_lattice(const TriangleMesh &mesh, Real dp, FillOptions options = {})
{
    if (mesh.size() == 0)
        throw ParameterError("cannot fill an empty mesh");
    if (!(dp > 0.0))
        throw ParameterError("lattice spacing must be positive");

    const auto [lower, upper] = mesh.bounds();
    const Vecd extent = upper - lower;
    const Real scale = extent.maxCoeff();
    std::array<Index, 3> count{};
    for (int d = 0; d != 3; ++d)
        count[d] = std::max<Index>(1, static_cast<Index>(std::llround(extent[d] / dp)));

    const std::array<Vecd, 3> base_directions = {Vecd(1.0, 0.0123456789, 0.0078901234).normalized(),
                                                 Vecd(0.0067891234, 1.0, 0.0112233445).normalized(),
                                                 Vecd(0.0101010101, 0.0056789123, 1.0).normalized()};
    std::array<detail::TransverseBins, 3> bins = {detail::TransverseBins(mesh, 0), detail::TransverseBins(mesh, 1),
                                                  detail::TransverseBins(mesh, 2)};

    auto parity = [&](const Vecd &p, int axis) {
        Vecd direction = base_directions[axis];
        for (int attempt = 0; attempt <= options.max_jitter_retries; ++attempt)
        {
            const long crossings = bins[axis].countCrossings(p, direction, upper[axis] - p[axis] + dp, scale);
            if (crossings >= 0)
                return (crossings % 2) == 1;
            // deterministic jitter of the transverse components
            const Real jitter = 1e-3 * (attempt + 1);
            direction[(axis + 1) % 3] += jitter * 0.7071;
            direction[(axis + 2) % 3] -= jitter * 0.3183;
            direction.normalize();
        }
        throw NumericalError("ray parity undecidable after jitter retries");
    };

    LatticeBody body;
    Index candidates = 0, inconsistent = 0;
    for (Index k = 0; k != count[2]; ++k)
        for (Index j = 0; j != count[1]; ++j)
            for (Index i = 0; i != count[0]; ++i)
            {
                const Vecd p = lower + dp * Vecd(i + 0.5, j + 0.5, k + 0.5);
                if ((p.array() < lower.array()).any() || (p.array() > upper.array()).any())
                    continue;
                ++candidates;
                const bool inside = parity(p, 0);
                if (parity(p, 1) != inside || parity(p, 2) != inside)
                    ++inconsistent;
                if (inside)
                    body.positions.push_back(p);
            }
    if (candidates > 0 && Real(inconsistent) > options.max_inconsistent_fraction * Real(candidates))
        throw ParseError("mesh does not appear watertight: ray parity disagrees for " + std::to_string(inconsistent) +
                         " of " + std::to_string(candidates) + " lattice points; repair the mesh");
    body.volumes.assign(body.positions.size(), dp * dp * dp);
    return body;
}

/**
 * Fraction of particles lying in features thinner than `min_layers` lattice spacings, measured
 * as the shortest axis-aligned run of occupied lattice sites through the particle.
 */
inline Real thin_feature_fraction(std::span<const Vecd> positions, Real dp, Index min_layers = 3)
{
    if (positions.empty())
        return 0.0;
    Vecd lower = positions[0];
    for (const Vecd &p : positions)
        lower = lower.cwiseMin(p);
    auto key = [&](const Vecd &p) {
        std::array<long, 3> k{};
        for (int d = 0; d != 3; ++d)
            k[d] = std::lround((p[d] - lower[d]) / dp);
        return k;
    };
    std::vector<std::array<long, 3>> keys;
    keys.reserve(positions.size());
    for (const Vecd &p : positions)
        keys.push_back(key(p));
    std::vector<std::array<long, 3>> sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    auto occupied = [&](std::array<long, 3> k) { return std::binary_search(sorted.begin(), sorted.end(), k); };

    Index thin = 0;
    for (const auto &k : keys)
    {
        Index shortest = std::numeric_limits<Index>::max();
        for (int d = 0; d != 3; ++d)
        {
            Index run = 1;
            for (int dir : {-1, 1})
            {
                auto probe = k;
                for (Index step = 0; step + 1 < min_layers; ++step)
                {
                    probe[d] += dir;
                    if (!occupied(probe))
                        break;
                    ++run;
                }
            }
            shortest = std::min(shortest, run);
        }
        if (shortest < min_layers)
            ++thin;
    }
    return Real(thin) / Real(positions.size());
}

//=================================================================================================//
// Mesh fixtures
//=================================================================================================//
inline TriangleMesh make_box_mesh(const Vecd &lower, const Vecd &upper)
{
    TriangleMesh mesh;
    auto corner = [&](int i, int j, int k) {
        return Vecd(i ? upper[0] : lower[0], j ? upper[1] : lower[1], k ? upper[2] : lower[2]);
    };
    auto quad = [&](const Vecd &a, const Vecd &b, const Vecd &c, const Vecd &d) {
        mesh.addTriangle(a, b, c);
        mesh.addTriangle(a, c, d);
    };
    quad(corner(0, 0, 0), corner(0, 1, 0), corner(1, 1, 0), corner(1, 0, 0)); // -z
    quad(corner(0, 0, 1), corner(1, 0, 1), corner(1, 1, 1), corner(0, 1, 1)); // +z
    quad(corner(0, 0, 0), corner(1, 0, 0), corner(1, 0, 1), corner(0, 0, 1)); // -y
    quad(corner(0, 1, 0), corner(0, 1, 1), corner(1, 1, 1), corner(1, 1, 0)); // +y
    quad(corner(0, 0, 0), corner(0, 0, 1), corner(0, 1, 1), corner(0, 1, 0)); // -x
    quad(corner(1, 0, 0), corner(1, 1, 0), corner(1, 1, 1), corner(1, 0, 1)); // +x
    return mesh;
}

/** Subdivided icosahedron projected onto a sphere. */
inline TriangleMesh make_icosphere(Real radius, int subdivisions, const Vecd &center = Vecd::Zero())
{
    const Real t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vecd> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                           {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (Vecd &p : v)
        p.normalize();
    std::vector<std::array<Vecd, 3>> faces;
    const int f[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                          {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                          {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (const auto &face : f)
        faces.push_back({v[face[0]], v[face[1]], v[face[2]]});
    for (int s = 0; s != subdivisions; ++s)
    {
        std::vector<std::array<Vecd, 3>> refined;
        refined.reserve(faces.size() * 4);
        for (const auto &[a, b, c] : faces)
        {
            const Vecd ab = (a + b).normalized(), bc = (b + c).normalized(), ca = (c + a).normalized();
            refined.push_back({a, ab, ca});
            refined.push_back({b, bc, ab});
            refined.push_back({c, ca, bc});
            refined.push_back({ab, bc, ca});
        }
        faces = std::move(refined);
    }
    TriangleMesh mesh;
    for (const auto &[a, b, c] : faces)
        mesh.addTriangle(center + radius * a, center + radius * b, center + radius * c);
    return mesh;
}

/**
 * Closed surface of a voxel set: one quad per face between an occupied and an empty voxel.
 * `occupied(i, j, k)` is queried on [0, n) per axis.
 */
inline TriangleMesh make_voxel_surface(const std::array<Index, 3> &n, Real voxel, const Vecd &origin,
                                       const std::function<bool(long, long, long)> &occupied)
{
    auto filled = [&](long i, long j, long k) {
        if (i < 0 || j < 0 || k < 0 || i >= long(n[0]) || j >= long(n[1]) || k >= long(n[2]))
            return false;
        return occupied(i, j, k);
    };
    TriangleMesh mesh;
    for (long k = 0; k != long(n[2]); ++k)
        for (long j = 0; j != long(n[1]); ++j)
            for (long i = 0; i != long(n[0]); ++i)
            {
                if (!filled(i, j, k))
                    continue;
                const Vecd lo = origin + voxel * Vecd(i, j, k);
                auto p = [&](int a, int b, int c) { return Vecd(lo + voxel * Vecd(a, b, c)); };
                auto quad = [&](const Vecd &a, const Vecd &b, const Vecd &c, const Vecd &d) {
                    mesh.addTriangle(a, b, c);
                    mesh.addTriangle(a, c, d);
                };
                if (!filled(i - 1, j, k))
                    quad(p(0, 0, 0), p(0, 0, 1), p(0, 1, 1), p(0, 1, 0));
                if (!filled(i + 1, j, k))
                    quad(p(1, 0, 0), p(1, 1, 0), p(1, 1, 1), p(1, 0, 1));
                if (!filled(i, j - 1, k))
                    quad(p(0, 0, 0), p(1, 0, 0), p(1, 0, 1), p(0, 0, 1));
                if (!filled(i, j + 1, k))
                    quad(p(0, 1, 0), p(0, 1, 1), p(1, 1, 1), p(1, 1, 0));
                if (!filled(i, j, k - 1))
                    quad(p(0, 0, 0), p(0, 1, 0), p(1, 1, 0), p(1, 0, 0));
                if (!filled(i, j, k + 1))
                    quad(p(0, 0, 1), p(1, 0, 1), p(1, 1, 1), p(0, 1, 1));
            }
    return mesh;
}

struct LatticeTubeParameters
{
    Real outer_radius = 0.5;
    Real inner_radius = 0.3;
    Real length = 2.0;
    Real voxel = 0.05;
    int cells_around = 6;
    Real cell_pitch = 0.5;      // axial period of the diamond cells
    Real strut_fraction = 0.4;  // strut width as a fraction of a cell
    Real end_ring = 0.15;       // solid rings at both ends
};

/** Stent-like tube along +z: diamond lattice of struts between two solid end rings. */
inline TriangleMesh make_lattice_tube_mesh(const LatticeTubeParameters &p = {})
{
    const Index across = static_cast<Index>(std::ceil(2.0 * p.outer_radius / p.voxel));
    const Index along = static_cast<Index>(std::llround(p.length / p.voxel));
    const Vecd origin(-0.5 * across * p.voxel, -0.5 * across * p.voxel, 0.0);
    auto frac = [](Real x) { return x - std::floor(x); };
    return make_voxel_surface({across, across, along}, p.voxel, origin, [&](long i, long j, long k) {
        const Vecd c = origin + p.voxel * Vecd(i + 0.5, j + 0.5, k + 0.5);
        const Real radius = std::hypot(c[0], c[1]);
        if (radius < p.inner_radius || radius > p.outer_radius)
            return false;
        if (c[2] < p.end_ring || c[2] > p.length - p.end_ring)
            return true;
        const Real u = p.cells_around * std::atan2(c[1], c[0]) / (2.0 * std::numbers::pi);
        const Real w = (c[2] - p.end_ring) / p.cell_pitch;
        return frac(u + w) < p.strut_fraction || frac(u - w) < p.strut_fraction;
    });
}

//=================================================================================================//
/** Axis-aligned box or half-space {p : n.p >= offset} over reference positions. */
class BodyRegion
{
  public:
    static BodyRegion box(const Vecd &lower, const Vecd &upper) { return BodyRegion(lower, upper); }
    static BodyRegion halfSpace(const Vecd &normal, Real offset) { return BodyRegion(normal, offset); }

    bool contains(const Vecd &p) const
    {
        if (is_box_)
            return (p.array() >= lower_.array()).all() && (p.array() <= upper_.array()).all();
        return normal_.dot(p) >= offset_;
    }

    std::vector<Index> select(std::span<const Vecd> positions) const
    {
        std::vector<Index> selected;
        for (Index i = 0; i != positions.size(); ++i)
            if (contains(positions[i]))
                selected.push_back(i);
        return selected;
    }

  private:
    BodyRegion(const Vecd &lower, const Vecd &upper) : is_box_(true), lower_(lower), upper_(upper) {}
    BodyRegion(const Vecd &normal, Real offset) : is_box_(false), normal_(normal), offset_(offset) {}

    bool is_box_;
    Vecd lower_ = Vecd::Zero(), upper_ = Vecd::Zero();
    Vecd normal_ = Vecd::Zero();
    Real offset_ = 0.0;
};

//=================================================================================================//
// Initial velocity fields
//=================================================================================================//
/** Axial velocity on the moving part of the cable (x0 >= start). */
inline Vecd cable_velocity(const Vecd &r0, Real speed = 5.0, Real start = 7.5)
{
    return r0[0] >= start ? Vecd(speed, 0.0, 0.0) : Vecd::Zero();
}

inline Vecd bending_velocity() { return Vecd(5.0 * std::sqrt(3.0), 5.0, 0.0); }

/** v = omega x r0 with omega = (0, omega0 sin(pi y / 2L), 0). */
inline Vecd twisting_velocity(const Vecd &r0, Real omega0, Real column_length)
{
    const Vecd omega(0.0, omega0 * std::sin(std::numbers::pi * r0[1] / (2.0 * column_length)), 0.0);
    return omega.cross(r0);
}

/** +speed along axis at or above `top`, -speed at or below `bottom`, zero elsewhere. */
inline Vecd band_velocity(const Vecd &r0, int axis, Real bottom, Real top, Real speed = 5.0)
{
    Vecd v = Vecd::Zero();
    if (r0[axis] >= top)
        v[axis] = speed;
    else if (r0[axis] <= bottom)
        v[axis] = -speed;
    return v;
}

struct VelocityFieldParameters
{
    Real omega0 = 105.0;
    Real column_length = 6.0;
    int band_axis = 2;
    Real band_bottom = 0.0;
    Real band_top = 0.0;
    Real band_speed = 5.0;
};

inline std::vector<Vecd> initial_velocity_field(const std::string &case_id, std::span<const Vecd> positions,
                                                const VelocityFieldParameters &params = {})
{
    std::vector<Vecd> v;
    v.reserve(positions.size());
    if (case_id == "cable")
    {
        for (const Vecd &p : positions)
            v.push_back(cable_velocity(p));
    }
    else if (case_id == "bending")
    {
        v.assign(positions.size(), bending_velocity());
    }
    else if (case_id == "twisting")
    {
        if (!(params.omega0 > 0.0) || !std::isfinite(params.omega0) || !(params.column_length > 0.0))
            throw ConfigurationError("twisting requires positive omega0 and column length");
        for (const Vecd &p : positions)
            v.push_back(twisting_velocity(p, params.omega0, params.column_length));
    }
    else if (case_id == "stl")
    {
        for (const Vecd &p : positions)
            v.push_back(band_velocity(p, params.band_axis, params.band_bottom, params.band_top, params.band_speed));
    }
    else
        throw ConfigurationError("unknown case '" + case_id + "'");
    return v;
}

} // namespace tlsph

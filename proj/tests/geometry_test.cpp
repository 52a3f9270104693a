#include "test_support.hpp"

#include <tlsph/geometry.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

using namespace tlsph;

namespace
{
const std::string data_dir = TLSPH_TEST_DATA_DIR;

std::vector<std::array<Real, 3>> vertex_multiset(const TriangleMesh &mesh)
{
    std::vector<std::array<Real, 3>> out;
    for (const Vecd &p : mesh.vertices)
        out.push_back({p[0], p[1], p[2]});
    std::sort(out.begin(), out.end());
    return out;
}
} // namespace

TEST(LatticeBox, CableCount)
{
    const auto body = generate_lattice_box(Vecd(10.0, 0.2, 0.2), 0.05);
    EXPECT_EQ(body.positions.size(), 3200u);
    EXPECT_EQ(body.volumes.size(), 3200u);
    Real volume = 0.0;
    for (Real v : body.volumes)
    {
        EXPECT_DOUBLE_EQ(v, 0.05 * 0.05 * 0.05);
        volume += v;
    }
    EXPECT_NEAR(volume, 0.4, 1e-12);
    for (const Vecd &p : body.positions)
    {
        EXPECT_GT(p.minCoeff(), 0.0);
        EXPECT_LT(p[0], 10.0);
    }
}

TEST(LatticeBox, SingleCellAndOrigin)
{
    const auto body = generate_lattice_box(Vecd::Constant(1.0), 1.0, Vecd(-0.5, 0.0, 2.0));
    ASSERT_EQ(body.positions.size(), 1u);
    EXPECT_EQ(body.positions[0], Vecd(0.0, 0.5, 2.5));
}

TEST(LatticeBox, Errors)
{
    EXPECT_THROW(generate_lattice_box(Vecd(1.0, 0.1, 1.0), 0.2), ParameterError);
    EXPECT_THROW(generate_lattice_box(Vecd::Constant(1.0), 0.0), ParameterError);
    EXPECT_THROW(generate_lattice_box(Vecd(1.0, -1.0, 1.0), 0.1), ParameterError);
}

TEST(ParseStl, BinaryCubeFixture)
{
    const auto result = read_stl_file(data_dir + "/cube_binary.stl");
    EXPECT_EQ(result.mesh.size(), 12u);
    EXPECT_EQ(result.degenerate_dropped, 0u);
    const auto [lower, upper] = result.mesh.bounds();
    EXPECT_EQ(lower, Vecd::Zero());
    EXPECT_EQ(upper, Vecd::Ones());
}

TEST(ParseStl, AsciiAndBinaryCubesAgree)
{
    const auto ascii = read_stl_file(data_dir + "/cube_ascii.stl");
    const auto binary = read_stl_file(data_dir + "/cube_binary.stl");
    EXPECT_EQ(ascii.mesh.size(), 12u);
    EXPECT_EQ(vertex_multiset(ascii.mesh), vertex_multiset(binary.mesh));
}

TEST(ParseStl, EmptyInput)
{
    EXPECT_THROW(parse_stl(""), ParseError);
}

TEST(ParseStl, TruncatedBinaryReportsOffset)
{
    std::string bytes = serialize_stl_binary(make_box_mesh(Vecd::Zero(), Vecd::Ones()));
    bytes.resize(bytes.size() - 30);
    try
    {
        parse_stl(bytes);
        FAIL();
    }
    catch (const ParseError &e)
    {
        // last record starts at 84 + 11 * 50
        EXPECT_NE(std::string(e.what()).find("634"), std::string::npos) << e.what();
    }
}

TEST(ParseStl, AsciiKeywordErrorReportsLine)
{
    const std::string text = "solid broken\n"
                             "  facet normal 0 0 1\n"
                             "    outer loop\n"
                             "      vertex 0 0 0\n"
                             "      vertx 1 0 0\n"
                             "      vertex 0 1 0\n"
                             "    endloop\n"
                             "  endfacet\n"
                             "endsolid broken\n";
    try
    {
        parse_stl(text);
        FAIL();
    }
    catch (const ParseError &e)
    {
        EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos) << e.what();
    }
    EXPECT_THROW(parse_stl("solid unterminated\n  facet normal 0 0 1\n"), ParseError);
}

TEST(ParseStl, DegenerateTrianglesDropped)
{
    TriangleMesh mesh = make_box_mesh(Vecd::Zero(), Vecd::Ones());
    mesh.addTriangle(Vecd::Zero(), Vecd(1, 1, 1), Vecd(2, 2, 2));
    const auto result = parse_stl(serialize_stl_ascii(mesh));
    EXPECT_EQ(result.mesh.size(), 12u);
    EXPECT_EQ(result.degenerate_dropped, 1u);
}

TEST(ParseStl, SerializeRoundTripUpToFloatRounding)
{
    const TriangleMesh sphere = make_icosphere(0.7, 2, Vecd(0.1, -0.2, 0.3));
    for (const std::string &bytes : {serialize_stl_binary(sphere), serialize_stl_ascii(sphere)})
    {
        const auto parsed = parse_stl(bytes);
        ASSERT_EQ(parsed.mesh.size(), sphere.size());
        for (Index k = 0; k != sphere.vertices.size(); ++k)
            EXPECT_EQ(parsed.mesh.vertices[k], sphere.vertices[k].cast<float>().cast<Real>());
    }
}

TEST(FillMesh, UnitCubeCount)
{
    const auto mesh = read_stl_file(data_dir + "/cube_binary.stl").mesh;
    const auto body = fill_mesh_with_lattice(mesh, 0.25);
    EXPECT_EQ(body.positions.size(), 64u);
    for (const Vecd &p : body.positions)
        EXPECT_TRUE((p.array() > 0.0).all() && (p.array() < 1.0).all());
    for (Real v : body.volumes)
        EXPECT_DOUBLE_EQ(v, 0.25 * 0.25 * 0.25);
}

TEST(FillMesh, SphereVolume)
{
    const auto body = fill_mesh_with_lattice(make_icosphere(1.0, 4), 0.1);
    Real volume = 0.0;
    for (Real v : body.volumes)
        volume += v;
    const Real analytic = 4.0 / 3.0 * std::numbers::pi;
    EXPECT_NEAR(volume, analytic, 0.05 * analytic);
}

TEST(FillMesh, MatchesAnalyticMembershipAwayFromSurface)
{
    const Real radius = 1.0, dp = 0.07;
    const TriangleMesh mesh = make_icosphere(radius, 4);
    const auto body = fill_mesh_with_lattice(mesh, dp);
    std::vector<std::array<Real, 3>> kept;
    for (const Vecd &p : body.positions)
        kept.push_back({p[0], p[1], p[2]});
    std::sort(kept.begin(), kept.end());

    // same candidate lattice as the fill: cell centers of the mesh bounding box
    const auto [lower, upper] = mesh.bounds();
    const Vecd extent = upper - lower;
    // the icosphere is inscribed in the sphere; its faces lie within 1% of the radius
    const Real band = dp / 2 + 0.01 * radius;
    Index compared = 0;
    for (Index k = 0; k != Index(std::llround(extent[2] / dp)); ++k)
        for (Index j = 0; j != Index(std::llround(extent[1] / dp)); ++j)
            for (Index i = 0; i != Index(std::llround(extent[0] / dp)); ++i)
            {
                const Vecd p = lower + dp * Vecd(i + 0.5, j + 0.5, k + 0.5);
                if (std::abs(p.norm() - radius) <= band)
                    continue;
                const bool inside = p.norm() < radius;
                const bool filled = std::binary_search(kept.begin(), kept.end(), std::array<Real, 3>{p[0], p[1], p[2]});
                EXPECT_EQ(filled, inside) << p.transpose();
                ++compared;
            }
    EXPECT_GT(compared, 1000u);
}

TEST(FillMesh, BoxMatchesAnalyticMembership)
{
    const Vecd lower(-0.3, 0.1, 0.0), upper(0.9, 0.7, 0.45);
    const auto body = fill_mesh_with_lattice(make_box_mesh(lower, upper), 0.05);
    EXPECT_EQ(body.positions.size(), 24u * 12u * 9u);
}

TEST(FillMesh, OpenMeshRaisesParityError)
{
    const auto mesh = read_stl_file(data_dir + "/open_cube.stl").mesh;
    EXPECT_EQ(mesh.size(), 10u);
    try
    {
        fill_mesh_with_lattice(mesh, 0.1);
        FAIL();
    }
    catch (const ParseError &e)
    {
        EXPECT_NE(std::string(e.what()).find("watertight"), std::string::npos) << e.what();
    }
}

TEST(FillMesh, LatticeTubeFixture)
{
    const auto parsed = read_stl_file(data_dir + "/lattice_tube.stl");
    const auto body = fill_mesh_with_lattice(parsed.mesh, 0.05);
    EXPECT_GT(body.positions.size(), 1000u);
    for (const Vecd &p : body.positions)
    {
        const Real r = std::hypot(p[0], p[1]);
        EXPECT_GT(r, 0.3 - 0.05);
        EXPECT_LT(r, 0.5 + 0.05);
    }
}

TEST(ThinFeatures, SlabsAndBlocks)
{
    const auto slab = generate_lattice_box(Vecd(1.0, 1.0, 0.1), 0.05); // two layers
    EXPECT_DOUBLE_EQ(thin_feature_fraction(slab.positions, 0.05), 1.0);
    const auto block = generate_lattice_box(Vecd(1.0, 1.0, 1.0), 0.1);
    EXPECT_DOUBLE_EQ(thin_feature_fraction(block.positions, 0.1), 0.0);
}

TEST(BodyRegion, BoxAndHalfSpace)
{
    const std::vector<Vecd> points = {Vecd(0, 0, 0), Vecd(1, 0, 0), Vecd(2, 0, 0), Vecd(3, 0, 0)};
    EXPECT_EQ(BodyRegion::box(Vecd(0.5, -1, -1), Vecd(2, 1, 1)).select(points), (std::vector<Index>{1, 2}));
    EXPECT_EQ(BodyRegion::halfSpace(Vecd(1, 0, 0), 2.0).select(points), (std::vector<Index>{2, 3}));
    EXPECT_EQ(BodyRegion::halfSpace(Vecd(-1, 0, 0), -0.5).select(points), (std::vector<Index>{0}));
}

TEST(InitialVelocity, TwistingExamples)
{
    const std::vector<Vecd> points = {Vecd(0, 0, 0), Vecd(0, 6, 0), Vecd(0.5, 6, 0.5)};
    const auto v = initial_velocity_field("twisting", points, {});
    EXPECT_EQ(v[0], Vecd::Zero());
    EXPECT_LT(v[1].norm(), 1e-14);
    EXPECT_NEAR(v[2][0], 52.5, 1e-12);
    EXPECT_NEAR(v[2][1], 0.0, 1e-12);
    EXPECT_NEAR(v[2][2], -52.5, 1e-12);
}

TEST(InitialVelocity, TwistingBoundedByRotationSpeed)
{
    const auto body = generate_lattice_box(Vecd(1.0, 6.0, 1.0), 0.125, Vecd(-0.5, 0.0, -0.5));
    const auto v = initial_velocity_field("twisting", body.positions, {});
    Real max_radius = 0.0;
    for (const Vecd &p : body.positions)
        max_radius = std::max(max_radius, p.norm());
    for (const Vecd &u : v)
        EXPECT_LE(u.norm(), 105.0 * max_radius);
}

TEST(InitialVelocity, OtherCases)
{
    const std::vector<Vecd> cable = {Vecd(7.49, 0.1, 0.1), Vecd(7.5, 0.1, 0.1), Vecd(9.9, 0.1, 0.1)};
    const auto vc = initial_velocity_field("cable", cable);
    EXPECT_EQ(vc[0], Vecd::Zero());
    EXPECT_EQ(vc[1], Vecd(5, 0, 0));
    EXPECT_EQ(vc[2], Vecd(5, 0, 0));

    const auto vb = initial_velocity_field("bending", cable);
    EXPECT_EQ(vb[1], Vecd(5.0 * std::sqrt(3.0), 5.0, 0.0));

    VelocityFieldParameters bands;
    bands.band_bottom = 0.1;
    bands.band_top = 1.9;
    const std::vector<Vecd> tube = {Vecd(0, 0, 0.05), Vecd(0, 0, 1.0), Vecd(0, 0, 1.95)};
    const auto vs = initial_velocity_field("stl", tube, bands);
    EXPECT_EQ(vs[0], Vecd(0, 0, -5));
    EXPECT_EQ(vs[1], Vecd::Zero());
    EXPECT_EQ(vs[2], Vecd(0, 0, 5));

    EXPECT_THROW(initial_velocity_field("pendulum", cable), ConfigurationError);
}

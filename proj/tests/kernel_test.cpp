#include "test_support.hpp"

#include <tlsph/geometry.hpp>
#include <tlsph/kernel.hpp>

#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <set>

using namespace tlsph;

TEST(WendlandKernel, VanishesAtSupportBoundary)
{
    const Real h = 0.37;
    EXPECT_EQ(wendland_value(2.0 * h, h), 0.0);
    EXPECT_EQ(wendland_value(3.0 * h, h), 0.0);
    EXPECT_LT(wendland_value(2.0 * h - 1e-6, h), 1e-18);
    EXPECT_LT(wendland_gradient(Vecd(2.0 * h - 1e-6, 0, 0), h).norm(), 1e-10);
    EXPECT_EQ(wendland_gradient(Vecd(0, 2.0 * h, 0), h), Vecd::Zero());
}

TEST(WendlandKernel, NormalizationFromQuadrature)
{
    // 4 pi int_0^2 W(q) q^2 dq with W = (1 - q/2)^4 (1 + 2q) and sigma = 1
    const Real raw = test_util::adaptive_simpson(
        [](Real q) {
            const Real a = 1.0 - 0.5 * q;
            return 4.0 * std::numbers::pi * a * a * a * a * (1.0 + 2.0 * q) * q * q;
        },
        0.0, 2.0, 1e-14);
    const Real sigma = 1.0 / raw;
    EXPECT_NEAR(sigma, 21.0 / (16.0 * std::numbers::pi), 1e-12);
    EXPECT_NEAR(wendland_value(0.0, 1.0), sigma, 1e-12);
}

TEST(WendlandKernel, IntegratesToOneOverSupportBall)
{
    for (Real h : {0.0575, 1.0, 3.2})
    {
        const Real integral = test_util::adaptive_simpson(
            [h](Real r) { return 4.0 * std::numbers::pi * r * r * wendland_value(r, h); }, 0.0, 2.0 * h, 1e-13);
        EXPECT_NEAR(integral, 1.0, 1e-6) << "h = " << h;
    }
}

TEST(WendlandKernel, MonotoneNonIncreasing)
{
    const WendlandKernel kernel(1.0);
    Real previous = kernel.value(0.0);
    for (int k = 1; k <= 400; ++k)
    {
        const Real value = kernel.value(k * 0.005);
        EXPECT_GE(value, 0.0);
        EXPECT_LE(value, previous);
        previous = value;
    }
}

TEST(WendlandKernel, GradientMatchesCentralDifference)
{
    const Real h = 0.8;
    const Real step = 1e-6 * h;
    const Real r = h; // q = 1
    const Real fd = (wendland_value(r + step, h) - wendland_value(r - step, h)) / (2.0 * step);
    const Vecd direction = Vecd(0.3, -0.5, 0.8).normalized();
    const Vecd gradient = wendland_gradient(r * direction, h);
    EXPECT_NEAR(gradient.dot(direction), fd, 1e-6 * std::abs(fd));
    EXPECT_LT((gradient - gradient.dot(direction) * direction).norm(), 1e-12 * std::abs(fd));
    EXPECT_LT(gradient.dot(direction), 0.0);
}

TEST(WendlandKernel, GradientIsOdd)
{
    const Real h = 0.2;
    const Vecd r(0.05, -0.11, 0.07);
    EXPECT_EQ(wendland_gradient(-r, h), Vecd(-wendland_gradient(r, h)));
}

TEST(WendlandKernel, Errors)
{
    EXPECT_THROW(wendland_value(0.1, 0.0), ParameterError);
    EXPECT_THROW(wendland_value(0.1, -1.0), ParameterError);
    EXPECT_THROW(wendland_gradient(Vecd::Zero(), 1.0), NumericalError);
}

namespace
{
std::set<std::pair<Index, Index>> brute_force_pairs(const std::vector<Vecd> &positions, Real h)
{
    std::set<std::pair<Index, Index>> pairs;
    for (Index i = 0; i != positions.size(); ++i)
        for (Index j = 0; j != positions.size(); ++j)
        {
            const Real d = (positions[i] - positions[j]).norm();
            if (i != j && d < 2.0 * h)
                pairs.insert({i, j});
        }
    return pairs;
}

std::set<std::pair<Index, Index>> stored_pairs(const ReferenceNeighborhood &neighborhood)
{
    std::set<std::pair<Index, Index>> pairs;
    for (Index i = 0; i != neighborhood.size(); ++i)
        for (const auto &pair : neighborhood.neighbors(i))
            pairs.insert({i, pair.j});
    return pairs;
}
} // namespace

TEST(ReferenceNeighborhood, SingleParticleAndDistantPair)
{
    const std::vector<Vecd> one = {Vecd(1, 2, 3)};
    EXPECT_EQ(build_reference_neighborhoods(one, 0.1).neighborCount(0), 0u);

    const Real h = 0.1;
    const std::vector<Vecd> two = {Vecd::Zero(), Vecd(3.0 * h, 0, 0)};
    const auto neighborhood = build_reference_neighborhoods(two, h);
    EXPECT_EQ(neighborhood.neighborCount(0), 0u);
    EXPECT_EQ(neighborhood.neighborCount(1), 0u);
}

TEST(ReferenceNeighborhood, LatticeInteriorMatchesBruteForce)
{
    const Real dp = 0.1, h = 1.15 * dp;
    const auto lattice = generate_lattice_box(Vecd::Constant(1.0), dp);
    const auto neighborhood = build_reference_neighborhoods(lattice.positions, h);
    EXPECT_EQ(stored_pairs(neighborhood), brute_force_pairs(lattice.positions, h));

    // interior particle: all lattice offsets with |offset| < 2.3 dp
    Index expected = 0;
    for (int a = -3; a <= 3; ++a)
        for (int b = -3; b <= 3; ++b)
            for (int c = -3; c <= 3; ++c)
                if ((a || b || c) && std::sqrt(Real(a * a + b * b + c * c)) * dp < 2.0 * h)
                    ++expected;
    const Index center = 5 + 10 * 5 + 100 * 5;
    EXPECT_EQ(neighborhood.neighborCount(center), expected);
}

TEST(ReferenceNeighborhood, RandomCloudMatchesBruteForce)
{
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<Real> u(-1.0, 1.0);
    for (int trial = 0; trial != 3; ++trial)
    {
        std::vector<Vecd> positions(1500);
        for (auto &p : positions)
            p = Vecd(u(rng), 2.0 * u(rng), 0.5 * u(rng));
        const Real h = 0.04 + 0.03 * trial;
        EXPECT_EQ(stored_pairs(build_reference_neighborhoods(positions, h)), brute_force_pairs(positions, h));
    }
}

TEST(ReferenceNeighborhood, PairDataIsExactlyAntisymmetric)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<Real> u(0.0, 1.0);
    std::vector<Vecd> positions(800);
    for (auto &p : positions)
        p = Vecd(u(rng), u(rng), u(rng));
    const auto neighborhood = build_reference_neighborhoods(positions, 0.06);
    Index checked = 0;
    for (Index i = 0; i != neighborhood.size(); ++i)
        for (const auto &pair : neighborhood.neighbors(i))
        {
            const auto reverse = neighborhood.neighbors(pair.j);
            const auto it = std::find_if(reverse.begin(), reverse.end(), [i](const auto &p) { return p.j == i; });
            ASSERT_NE(it, reverse.end());
            EXPECT_EQ(it->gradient, Vecd(-pair.gradient));
            EXPECT_EQ(it->r0_ij, Vecd(-pair.r0_ij));
            EXPECT_EQ(it->distance, pair.distance);
            ++checked;
        }
    EXPECT_GT(checked, 0u);
}

TEST(ReferenceNeighborhood, NeighborListsSortedAndPairDataConsistent)
{
    const Real dp = 0.25, h = 1.15 * dp;
    const auto lattice = generate_lattice_box(Vecd(1.0, 0.5, 0.75), dp);
    const auto neighborhood = build_reference_neighborhoods(lattice.positions, h);
    for (Index i = 0; i != neighborhood.size(); ++i)
    {
        Index previous = 0;
        bool first = true;
        for (const auto &pair : neighborhood.neighbors(i))
        {
            if (!first)
                EXPECT_GT(pair.j, previous);
            first = false;
            previous = pair.j;
            const Vecd r = lattice.positions[i] - lattice.positions[pair.j];
            EXPECT_NEAR((pair.r0_ij - r).norm(), 0.0, 1e-15);
            EXPECT_NEAR((pair.gradient - wendland_gradient(r, h)).norm(), 0.0, 1e-12 * pair.gradient.norm());
        }
    }
}

TEST(ReferenceNeighborhood, DuplicatePositionNamesIndices)
{
    const std::vector<Vecd> positions = {Vecd(0, 0, 0), Vecd(0.1, 0, 0), Vecd(0.2, 0, 0), Vecd(0.1, 0, 0)};
    try
    {
        build_reference_neighborhoods(positions, 0.1);
        FAIL() << "expected a duplicate-position error";
    }
    catch (const ParameterError &e)
    {
        const std::string message = e.what();
        EXPECT_NE(message.find('1'), std::string::npos) << message;
        EXPECT_NE(message.find('3'), std::string::npos) << message;
    }
}

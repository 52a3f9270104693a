#pragma once

/**
 * @file kernel.hpp
 * @brief Wendland C2 smoothing kernel and the fixed reference-configuration neighborhoods.
 *
 * In the total Lagrangian setting neighbors are searched once in the initial configuration
 * and every pair's kernel gradient is precomputed; nothing here changes during a run.
 */

#include "common.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>

namespace tlsph
{
//=================================================================================================//
/**
 * Wendland C2 kernel in 3D: W(q) = sigma / h^3 (1 - q/2)^4 (1 + 2q) for q = r/h in [0, 2].
 */
class WendlandKernel
{
  public:
    static constexpr Real normalization = 21.0 / (16.0 * std::numbers::pi);

    explicit WendlandKernel(Real h) : h_(h), inv_h_(1.0 / h)
    {
        if (!(h > 0.0) || !std::isfinite(h))
            throw ParameterError("smoothing length must be positive, got " + std::to_string(h));
        factor_w_ = normalization * inv_h_ * inv_h_ * inv_h_;
        factor_dw_ = factor_w_ * inv_h_;
    }

    Real smoothingLength() const { return h_; }
    Real supportRadius() const { return 2.0 * h_; }

    Real value(Real distance) const
    {
        const Real q = distance * inv_h_;
        if (q >= 2.0)
            return 0.0;
        const Real a = 1.0 - 0.5 * q;
        const Real a2 = a * a;
        return factor_w_ * a2 * a2 * (1.0 + 2.0 * q);
    }

    /** dW/dr, non-positive on the support. */
    Real derivative(Real distance) const
    {
        const Real q = distance * inv_h_;
        if (q >= 2.0)
            return 0.0;
        const Real a = 1.0 - 0.5 * q;
        return -5.0 * factor_dw_ * q * a * a * a;
    }

    /** Gradient with respect to the first particle of the separation r_ij = r_i - r_j. */
    Vecd gradient(const Vecd &r_ij) const
    {
        const Real distance = r_ij.norm();
        if (!(distance > 0.0))
            throw NumericalError("kernel gradient requested for coincident particles");
        return (derivative(distance) / distance) * r_ij;
    }

  private:
    Real h_;
    Real inv_h_;
    Real factor_w_;
    Real factor_dw_;
};

inline Real wendland_value(Real distance, Real h) { return WendlandKernel(h).value(distance); }
inline Vecd wendland_gradient(const Vecd &r0_ij, Real h) { return WendlandKernel(h).gradient(r0_ij); }

//=================================================================================================//
/**
 * Compressed per-particle neighbor lists with pair data from the reference configuration.
 * Entries for particle i live in [offset(i), offset(i+1)), sorted by neighbor index.
 * Pair data for (j, i) is the exact negation of the data for (i, j).
 */
class ReferenceNeighborhood
{
  public:
    struct Pair
    {
        Index j;
        Vecd r0_ij;     // r0_i - r0_j
        Real distance;  // |r0_ij|
        Vecd gradient;  // grad_i W_ij in the reference configuration
    };

    ReferenceNeighborhood() : offsets_(1, 0) {}
    ReferenceNeighborhood(std::vector<Index> offsets, std::vector<Pair> pairs, Real h)
        : offsets_(std::move(offsets)), pairs_(std::move(pairs)), h_(h) {}

    Index size() const { return offsets_.size() - 1; }
    Index pairCount() const { return pairs_.size(); }
    Real smoothingLength() const { return h_; }

    std::span<const Pair> neighbors(Index i) const
    {
        return {pairs_.data() + offsets_[i], pairs_.data() + offsets_[i + 1]};
    }
    Index neighborCount(Index i) const { return offsets_[i + 1] - offsets_[i]; }

  private:
    std::vector<Index> offsets_;
    std::vector<Pair> pairs_;
    Real h_ = 0.0;
};

//=================================================================================================//
/**
 * Cell-linked neighbor search with cell size equal to the support radius 2h.
 * Throws ParameterError on duplicate positions, naming both indices.
 */
inline ReferenceNeighborhood build_reference_neighborhoods(std::span<const Vecd> positions, Real h)
{
    const WendlandKernel kernel(h);
    const Real cutoff = kernel.supportRadius();
    const Index n = positions.size();
    if (n == 0)
        return ReferenceNeighborhood({0}, {}, h);

    Vecd lower = positions[0], upper = positions[0];
    for (const Vecd &p : positions)
    {
        if (!is_finite(p))
            throw ParameterError("non-finite reference position");
        lower = lower.cwiseMin(p);
        upper = upper.cwiseMax(p);
    }

    std::array<Index, 3> cells{};
    for (int d = 0; d != 3; ++d)
        cells[d] = static_cast<Index>(std::floor((upper[d] - lower[d]) / cutoff)) + 1;
    auto cell_of = [&](const Vecd &p) {
        std::array<Index, 3> c{};
        for (int d = 0; d != 3; ++d)
            c[d] = std::min(cells[d] - 1, static_cast<Index>(std::floor((p[d] - lower[d]) / cutoff)));
        return c;
    };
    auto linear = [&](const std::array<Index, 3> &c) { return (c[2] * cells[1] + c[1]) * cells[0] + c[0]; };

    // counting sort of particles into cells; particles keep ascending order inside a cell
    const Index cell_total = cells[0] * cells[1] * cells[2];
    std::vector<Index> cell_start(cell_total + 1, 0);
    std::vector<Index> particle_cell(n);
    for (Index i = 0; i != n; ++i)
    {
        particle_cell[i] = linear(cell_of(positions[i]));
        ++cell_start[particle_cell[i] + 1];
    }
    for (Index c = 0; c != cell_total; ++c)
        cell_start[c + 1] += cell_start[c];
    std::vector<Index> cell_particles(n);
    {
        std::vector<Index> fill(cell_start.begin(), cell_start.end() - 1);
        for (Index i = 0; i != n; ++i)
            cell_particles[fill[particle_cell[i]]++] = i;
    }

    std::vector<std::vector<Index>> lists(n);
    for (Index i = 0; i != n; ++i)
    {
        const auto c = cell_of(positions[i]);
        for (Index z = (c[2] > 0 ? c[2] - 1 : 0); z <= std::min(c[2] + 1, cells[2] - 1); ++z)
            for (Index y = (c[1] > 0 ? c[1] - 1 : 0); y <= std::min(c[1] + 1, cells[1] - 1); ++y)
                for (Index x = (c[0] > 0 ? c[0] - 1 : 0); x <= std::min(c[0] + 1, cells[0] - 1); ++x)
                {
                    const Index cell = linear({x, y, z});
                    for (Index k = cell_start[cell]; k != cell_start[cell + 1]; ++k)
                    {
                        const Index j = cell_particles[k];
                        if (j == i)
                            continue;
                        const Real distance = (positions[i] - positions[j]).norm();
                        if (distance == 0.0)
                            throw ParameterError("duplicate particle positions at indices " +
                                                 std::to_string(std::min(i, j)) + " and " +
                                                 std::to_string(std::max(i, j)));
                        if (distance < cutoff)
                            lists[i].push_back(j);
                    }
                }
        std::sort(lists[i].begin(), lists[i].end());
    }

    std::vector<Index> offsets(n + 1, 0);
    for (Index i = 0; i != n; ++i)
        offsets[i + 1] = offsets[i] + lists[i].size();
    std::vector<ReferenceNeighborhood::Pair> pairs(offsets[n]);
    for (Index i = 0; i != n; ++i)
    {
        Index slot = offsets[i];
        for (Index j : lists[i])
        {
            // pair data is computed once in the (lo, hi) orientation and negated for (hi, lo)
            const Index lo = std::min(i, j), hi = std::max(i, j);
            const Vecd r = positions[lo] - positions[hi];
            const Real distance = r.norm();
            const Vecd gradient = (kernel.derivative(distance) / distance) * r;
            if (i == lo)
                pairs[slot++] = {j, r, distance, gradient};
            else
                pairs[slot++] = {j, -r, distance, -gradient};
        }
    }
    return ReferenceNeighborhood(std::move(offsets), std::move(pairs), h);
}

} // namespace tlsph

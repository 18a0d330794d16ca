// Multi-radial symmetry as a linear reduction: a coordinate block of width b_j
// with divisor A_j satisfies q^(j)(s + k/A_j) = -q^(j)(s). The free variables
// live on the fundamental domain (the first k/A_j nodes of each block); the
// full trajectory is reconstructed by sign-flipped shifts, bit for bit.
#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "nbody/core.hpp"

namespace nbody {

struct SymmetryBlock {
    int width = 0;    // b_j, coordinates in this block
    int divisor = 0;  // A_j, antiperiod T/A_j; must be even and divide k
};

struct SymmetrySpec {
    std::vector<SymmetryBlock> blocks;

    void validate(const ProblemSpec& p) const {
        int width_sum = 0;
        for (std::size_t j = 0; j < blocks.size(); ++j) {
            const SymmetryBlock& b = blocks[j];
            if (b.width < 1) throw SpecError("block " + std::to_string(j) + ": width must be positive");
            if (b.divisor < 1) throw SpecError("block " + std::to_string(j) + ": divisor must be positive");
            if (b.divisor % 2 != 0)
                throw SpecError("block " + std::to_string(j) +
                                ": divisor must be even (odd divisors force the zero trajectory)");
            if (p.k % b.divisor != 0)
                throw SpecError("block " + std::to_string(j) + ": divisor must divide k");
            width_sum += b.width;
        }
        if (width_sum != p.dim) throw SpecError("block widths must sum to dim");
    }

    /// Free variable count of the fundamental domain.
    std::size_t reduced_size(const ProblemSpec& p) const {
        std::size_t n = 0;
        for (const SymmetryBlock& b : blocks)
            n += static_cast<std::size_t>(p.k / b.divisor) * p.n_bodies * b.width;
        return n;
    }
};

/// Free variables of the fundamental domain: per block, (k/A_j) x N x b_j,
/// node-major, blocks concatenated in order.
struct ReducedVector {
    std::vector<double> data;

    double norm() const {
        double s = 0.0;
        for (double v : data) s += v * v;
        return std::sqrt(s);
    }
};

namespace detail {

// Visits every (reduced index, full trajectory index, sign) correspondence.
template <typename F>
inline void for_each_symmetry_entry(const SymmetrySpec& sym, const ProblemSpec& p, F&& f) {
    std::size_t off = 0;
    int c0 = 0;
    for (const SymmetryBlock& b : sym.blocks) {
        const int kt = p.k / b.divisor;  // fundamental-domain node count
        for (int m = 0; m < b.divisor; ++m) {
            const bool flip = (m % 2) != 0;
            for (int s0 = 0; s0 < kt; ++s0)
                for (int i = 0; i < p.n_bodies; ++i)
                    for (int c = 0; c < b.width; ++c) {
                        const std::size_t red_idx =
                            off + (static_cast<std::size_t>(s0) * p.n_bodies + i) * b.width + c;
                        const long s = static_cast<long>(m) * kt + s0;
                        f(red_idx, s, i, c0 + c, flip);
                    }
        }
        off += static_cast<std::size_t>(kt) * p.n_bodies * b.width;
        c0 += b.width;
    }
}

}  // namespace detail

/// Full trajectory from fundamental-domain values; satisfies the block
/// antiperiods exactly (negation only, no rounding).
inline Trajectory reconstruct(const ReducedVector& red, const SymmetrySpec& sym,
                              const ProblemSpec& problem) {
    problem.validate();
    sym.validate(problem);
    if (red.data.size() != sym.reduced_size(problem))
        throw SpecError("reduced vector size mismatch");
    Trajectory traj = Trajectory::zeros(problem);
    detail::for_each_symmetry_entry(sym, problem,
                                    [&](std::size_t ri, long s, int i, int c, bool flip) {
                                        const double v = red.data[ri];
                                        traj.at(s, i, c) = flip ? -v : v;
                                    });
    return traj;
}

/// Adjoint of reconstruct: pulls a full-trajectory gradient back to the
/// reduced variables, so that d/de J(reconstruct(red + e*v)) = <out, v>.
inline ReducedVector reduce_gradient(const std::vector<double>& full_grad, const SymmetrySpec& sym,
                                     const ProblemSpec& problem) {
    problem.validate();
    sym.validate(problem);
    const std::size_t full = static_cast<std::size_t>(problem.k) * problem.n_bodies * problem.dim;
    if (full_grad.size() != full) throw SpecError("full gradient size mismatch");
    ReducedVector out;
    out.data.assign(sym.reduced_size(problem), 0.0);
    const std::size_t nd = static_cast<std::size_t>(problem.n_bodies) * problem.dim;
    detail::for_each_symmetry_entry(sym, problem,
                                    [&](std::size_t ri, long s, int i, int c, bool flip) {
                                        const std::size_t fi =
                                            static_cast<std::size_t>(s) * nd + static_cast<std::size_t>(i) * problem.dim + c;
                                        out.data[ri] += flip ? -full_grad[fi] : full_grad[fi];
                                    });
    return out;
}

/// Max violation of the block antiperiods: max |q^(j)(s + k/A_j) + q^(j)(s)|.
inline double check_symmetry(const Trajectory& traj, const SymmetrySpec& sym) {
    const ProblemSpec& p = traj.spec;
    sym.validate(p);
    double worst = 0.0;
    int c0 = 0;
    for (const SymmetryBlock& b : sym.blocks) {
        const int kt = p.k / b.divisor;
        for (int s = 0; s < p.k; ++s)
            for (int i = 0; i < p.n_bodies; ++i)
                for (int c = 0; c < b.width; ++c) {
                    const double v = traj.at(s + kt, i, c0 + c) + traj.at(s, i, c0 + c);
                    worst = std::max(worst, std::abs(v));
                }
        c0 += b.width;
    }
    return worst;
}

/// Restriction of a symmetric trajectory to its fundamental domain.
inline ReducedVector restrict_to_domain(const Trajectory& traj, const SymmetrySpec& sym) {
    const ProblemSpec& p = traj.spec;
    sym.validate(p);
    ReducedVector out;
    out.data.assign(sym.reduced_size(p), 0.0);
    std::size_t off = 0;
    int c0 = 0;
    for (const SymmetryBlock& b : sym.blocks) {
        const int kt = p.k / b.divisor;
        for (int s0 = 0; s0 < kt; ++s0)
            for (int i = 0; i < p.n_bodies; ++i)
                for (int c = 0; c < b.width; ++c)
                    out.data[off + (static_cast<std::size_t>(s0) * p.n_bodies + i) * b.width + c] =
                        traj.at(s0, i, c0 + c);
        off += static_cast<std::size_t>(kt) * p.n_bodies * b.width;
        c0 += b.width;
    }
    return out;
}

}  // namespace nbody

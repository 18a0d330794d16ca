// Pairwise power-law potential, its gradient, and the strong-force
// regularized variant with a C1 cutoff near collision.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nbody/core.hpp"

namespace nbody {

/// Potential value and gradient at a single configuration (N x d).
struct PotentialValue {
    double u = 0.0;
    std::vector<double> grad;  // N*d, body-major
};

/// Total discrete potential over all nodes, with per-node-and-body gradient.
struct TotalPotential {
    double u_hat = 0.0;
    std::vector<double> grad;  // k*N*d, time-major
};

/// Cutoff value and derivative at r.
struct CutoffValue {
    double value = 0.0;
    double derivative = 0.0;
};

/// C1 cutoff: 1 for r <= delta/2, 0 for r >= delta, smoothstep between.
inline CutoffValue cutoff_phi(double r, double delta) {
    if (!(delta > 0.0)) throw std::domain_error("cutoff_phi: delta must be positive");
    const double lo = 0.5 * delta;
    if (r <= lo) return {1.0, 0.0};
    if (r >= delta) return {0.0, 0.0};
    const double u = (r - lo) / lo;
    const double du = 1.0 / lo;
    return {1.0 - (3.0 * u * u - 2.0 * u * u * u), -(6.0 * u - 6.0 * u * u) * du};
}

/// U_il(r) = -m_i*m_l / r^alpha.
inline double pair_potential(double r, double m_i, double m_l, double alpha) {
    if (!(r > 0.0)) throw SingularityError();
    return -m_i * m_l / std::pow(r, alpha);
}

/// U_il minus the cut-off strong-force term phi(r)/r^2 (active near collision).
inline double regularized_pair_potential(double r, double m_i, double m_l, double alpha,
                                         double delta) {
    if (!(delta > 0.0)) throw std::domain_error("regularized_pair_potential: delta must be positive");
    if (!(r > 0.0)) throw SingularityError();
    const CutoffValue phi = cutoff_phi(r, delta);
    return pair_potential(r, m_i, m_l, alpha) - phi.value / (r * r);
}

namespace detail {

// Value and radial derivative of the (possibly regularized) pair potential.
struct PairEval {
    double u;
    double du_dr;
};

inline PairEval pair_eval(double r, double m_i, double m_l, double alpha, double delta) {
    if (!(r > 0.0)) throw SingularityError();
    const double mm = m_i * m_l;
    PairEval e;
    e.u = -mm / std::pow(r, alpha);
    e.du_dr = alpha * mm / std::pow(r, alpha + 1.0);
    if (delta > 0.0) {
        const CutoffValue phi = cutoff_phi(r, delta);
        const double r2 = r * r;
        e.u -= phi.value / r2;
        e.du_dr -= phi.derivative / r2 - 2.0 * phi.value / (r2 * r);
    }
    return e;
}

}  // namespace detail

/// Gradient of U_il with respect to q_i; diff = q_i - q_l.
inline std::vector<double> pair_force(const std::vector<double>& diff, double m_i, double m_l,
                                      double alpha) {
    double r2 = 0.0;
    for (double c : diff) r2 += c * c;
    const double r = std::sqrt(r2);
    if (!(r > 0.0)) throw SingularityError();
    const double w = alpha * m_i * m_l / std::pow(r, alpha + 2.0);
    std::vector<double> out(diff.size());
    for (std::size_t c = 0; c < diff.size(); ++c) out[c] = w * diff[c];
    return out;
}

/// Potential and gradient of one node configuration; delta-aware.
/// Throws SingularityError naming the first coincident pair.
inline PotentialValue node_potential(const Trajectory& traj, long s) {
    const ProblemSpec& p = traj.spec;
    const int n = p.n_bodies, d = p.dim;
    PotentialValue out;
    out.grad.assign(static_cast<std::size_t>(n) * d, 0.0);
    for (int i = 0; i < n; ++i)
        for (int l = i + 1; l < n; ++l) {
            double r2 = 0.0;
            for (int c = 0; c < d; ++c) {
                const double diff = traj.at(s, i, c) - traj.at(s, l, c);
                r2 += diff * diff;
            }
            const double r = std::sqrt(r2);
            if (!(r > 0.0)) throw SingularityError(((s % p.k) + p.k) % p.k, i, l);
            const detail::PairEval e = detail::pair_eval(r, p.masses[i], p.masses[l], p.alpha, p.delta);
            out.u += e.u;
            const double w = e.du_dr / r;  // d/dq_i of u(|q_i-q_l|) = u' * (q_i-q_l)/r
            for (int c = 0; c < d; ++c) {
                const double diff = traj.at(s, i, c) - traj.at(s, l, c);
                out.grad[static_cast<std::size_t>(i) * d + c] += w * diff;
                out.grad[static_cast<std::size_t>(l) * d + c] -= w * diff;
            }
        }
    return out;
}

/// U_hat = sum over nodes of the node potential; gradient per node and body.
/// Fixed summation order: s ascending, pairs (i,l) lexicographic.
inline TotalPotential total_potential(const Trajectory& traj) {
    const ProblemSpec& p = traj.spec;
    const std::size_t nd = static_cast<std::size_t>(p.n_bodies) * p.dim;
    TotalPotential out;
    out.grad.assign(static_cast<std::size_t>(p.k) * nd, 0.0);
    for (int s = 0; s < p.k; ++s) {
        const PotentialValue pv = node_potential(traj, s);
        out.u_hat += pv.u;
        for (std::size_t j = 0; j < nd; ++j) out.grad[static_cast<std::size_t>(s) * nd + j] = pv.grad[j];
    }
    return out;
}

}  // namespace nbody

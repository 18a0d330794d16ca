// Discrete action J, its gradient, the difference-equation residual,
// and the per-segment discrete energy diagnostic.
//
// The kinetic quadratic form is evaluated from neighbor differences; the
// circulant second-difference matrix is never materialized.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "nbody/core.hpp"
#include "nbody/potential.hpp"

namespace nbody {

struct ActionReport {
    double j = 0.0;
    std::vector<double> grad;  // k*N*d, time-major
    double grad_norm = 0.0;
    double kinetic = 0.0;
    double u_hat = 0.0;
};

/// Discrete energy per segment, its mean, and the max deviation from the mean.
struct EnergySeries {
    std::vector<double> e;
    double mean = 0.0;
    double max_dev = 0.0;
};

namespace detail {

// Shared kernel: J = (1/2h) sum m_i |q(s+1)-q(s)|^2 - U_hat*h and its gradient.
// residual_n1 is the same expression entry for entry, so the identity between
// the first-order residual and the action gradient holds bitwise.
inline ActionReport action_kernel(const Trajectory& traj) {
    const ProblemSpec& p = traj.spec;
    const double h = p.step();
    const int n = p.n_bodies, d = p.dim;
    const TotalPotential tp = total_potential(traj);

    ActionReport rep;
    rep.u_hat = tp.u_hat;
    rep.grad.assign(static_cast<std::size_t>(p.k) * n * d, 0.0);

    double kin = 0.0;
    for (int s = 0; s < p.k; ++s)
        for (int i = 0; i < n; ++i) {
            double seg = 0.0;
            for (int c = 0; c < d; ++c) {
                const double diff = traj.at(s + 1, i, c) - traj.at(s, i, c);
                seg += diff * diff;
            }
            kin += p.masses[i] * seg;
        }
    rep.kinetic = kin / (2.0 * h);
    rep.j = rep.kinetic - rep.u_hat * h;

    double gn2 = 0.0;
    for (int s = 0; s < p.k; ++s)
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < d; ++c) {
                const double second =
                    2.0 * traj.at(s, i, c) - traj.at(s + 1, i, c) - traj.at(s - 1, i, c);
                const double g = (p.masses[i] / h) * second - h * tp.grad[traj.index(s, i, c)];
                rep.grad[traj.index(s, i, c)] = g;
                gn2 += g * g;
            }
    rep.grad_norm = std::sqrt(gn2);
    return rep;
}

}  // namespace detail

inline ActionReport action(const Trajectory& traj) { return detail::action_kernel(traj); }

struct Residual {
    std::vector<double> res;  // k*N*d
    double norm = 0.0;
};

/// Entrywise residual of the discrete Euler-Lagrange equation. Identical to
/// the action gradient (critical points of J are exactly the solutions).
inline Residual residual_n1(const Trajectory& traj) {
    ActionReport rep = detail::action_kernel(traj);
    return Residual{std::move(rep.grad), rep.grad_norm};
}

/// e[s] = sum_i (m_i/2)|(q(s+1)-q(s))/h|^2 - (U(s)+U(s+1))/2.
/// Velocity is the segment slope; the potential is endpoint-averaged.
inline EnergySeries discrete_energy(const Trajectory& traj) {
    const ProblemSpec& p = traj.spec;
    const double h = p.step();
    const int n = p.n_bodies, d = p.dim;

    std::vector<double> u(p.k);
    for (int s = 0; s < p.k; ++s) u[s] = node_potential(traj, s).u;

    EnergySeries es;
    es.e.resize(p.k);
    double sum = 0.0;
    for (int s = 0; s < p.k; ++s) {
        double kin = 0.0;
        for (int i = 0; i < n; ++i) {
            double v2 = 0.0;
            for (int c = 0; c < d; ++c) {
                const double v = (traj.at(s + 1, i, c) - traj.at(s, i, c)) / h;
                v2 += v * v;
            }
            kin += 0.5 * p.masses[i] * v2;
        }
        es.e[s] = kin - 0.5 * (u[s] + u[(s + 1) % p.k]);
        sum += es.e[s];
    }
    es.mean = sum / p.k;
    for (double e : es.e) es.max_dev = std::max(es.max_dev, std::abs(e - es.mean));
    return es;
}

}  // namespace nbody

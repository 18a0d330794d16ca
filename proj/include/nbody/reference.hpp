// Analytic reference orbit (Lagrange equilateral relative equilibrium) and an
// independent RK4 time-stepping oracle for convergence checks.
#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "nbody/core.hpp"
#include "nbody/potential.hpp"

namespace nbody {

/// Three equal masses on an equilateral triangle rotating on a circle of
/// radius side/sqrt(3). Force balance fixes omega^2 * side^3 = 3*G*m.
struct LagrangeOrbit {
    double mass = 1.0;
    double side = 1.0;
    double omega = 0.0;
    double period = 0.0;

    static LagrangeOrbit make(double mass, double side, double g_const = 1.0) {
        if (!(mass > 0.0) || !(side > 0.0)) throw SpecError("LagrangeOrbit: mass and side must be positive");
        LagrangeOrbit o;
        o.mass = mass;
        o.side = side;
        o.omega = std::sqrt(3.0 * g_const * mass / (side * side * side));
        o.period = 2.0 * std::numbers::pi / o.omega;
        return o;
    }

    double circumradius() const { return side / std::sqrt(3.0); }
};

/// Sample the Lagrange orbit on k uniform nodes (planar, alpha = 1).
inline Trajectory sample_lagrange(const LagrangeOrbit& orbit, int k) {
    if (k < 3) throw SpecError("sample_lagrange: k must be at least 3");
    ProblemSpec p;
    p.n_bodies = 3;
    p.dim = 2;
    p.masses = {orbit.mass, orbit.mass, orbit.mass};
    p.alpha = 1.0;
    p.period = orbit.period;
    p.k = k;
    p.delta = 0.0;
    const double R = orbit.circumradius();
    std::vector<double> v(static_cast<std::size_t>(k) * 3 * 2);
    for (int s = 0; s < k; ++s)
        for (int i = 0; i < 3; ++i) {
            const double th = 2.0 * std::numbers::pi * s / k + 2.0 * std::numbers::pi * i / 3.0;
            v[(static_cast<std::size_t>(s) * 3 + i) * 2 + 0] = R * std::cos(th);
            v[(static_cast<std::size_t>(s) * 3 + i) * 2 + 1] = R * std::sin(th);
        }
    return Trajectory(p, std::move(v));
}

struct FlowResult {
    std::vector<double> times;
    std::vector<std::vector<double>> positions;   // per sample, N*d
    std::vector<std::vector<double>> velocities;  // per sample, N*d
};

namespace detail {

// Accelerations a_i = -grad_i U / m_i for one configuration; delta-aware.
inline std::vector<double> accelerations(const std::vector<double>& pos, const ProblemSpec& p) {
    const int n = p.n_bodies, d = p.dim;
    std::vector<double> acc(static_cast<std::size_t>(n) * d, 0.0);
    for (int i = 0; i < n; ++i)
        for (int l = i + 1; l < n; ++l) {
            double r2 = 0.0;
            for (int c = 0; c < d; ++c) {
                const double diff = pos[static_cast<std::size_t>(i) * d + c] - pos[static_cast<std::size_t>(l) * d + c];
                r2 += diff * diff;
            }
            const double r = std::sqrt(r2);
            if (!(r > 1e-9)) throw SingularityError(-1, i, l);
            const PairEval e = pair_eval(r, p.masses[i], p.masses[l], p.alpha, p.delta);
            const double w = e.du_dr / r;
            for (int c = 0; c < d; ++c) {
                const double diff = pos[static_cast<std::size_t>(i) * d + c] - pos[static_cast<std::size_t>(l) * d + c];
                acc[static_cast<std::size_t>(i) * d + c] -= w * diff / p.masses[i];
                acc[static_cast<std::size_t>(l) * d + c] += w * diff / p.masses[l];
            }
        }
    return acc;
}

}  // namespace detail

/// Classical RK4 on m_i q''_i = -grad_i U with fixed step t_end/steps.
/// Aborts on close approach (< 1e-9) or non-finite state.
inline FlowResult rk4_flow(const std::vector<double>& pos0, const std::vector<double>& vel0,
                           const ProblemSpec& problem, long steps, double t_end) {
    problem.validate();
    const std::size_t m = static_cast<std::size_t>(problem.n_bodies) * problem.dim;
    if (pos0.size() != m || vel0.size() != m) throw SpecError("rk4_flow: state size mismatch");
    if (steps < 1) throw SpecError("rk4_flow: steps must be positive");
    const double dt = t_end / static_cast<double>(steps);

    FlowResult out;
    out.times.reserve(steps + 1);
    out.positions.reserve(steps + 1);
    out.velocities.reserve(steps + 1);

    std::vector<double> q = pos0, v = vel0;
    out.times.push_back(0.0);
    out.positions.push_back(q);
    out.velocities.push_back(v);

    std::vector<double> qa(m), va(m);
    for (long n = 0; n < steps; ++n) {
        const std::vector<double> a1 = detail::accelerations(q, problem);
        for (std::size_t j = 0; j < m; ++j) qa[j] = q[j] + 0.5 * dt * v[j];
        const std::vector<double> a2 = detail::accelerations(qa, problem);
        for (std::size_t j = 0; j < m; ++j) va[j] = q[j] + 0.5 * dt * (v[j] + 0.5 * dt * a1[j]);
        const std::vector<double> a3 = detail::accelerations(va, problem);
        std::vector<double> qe(m);
        for (std::size_t j = 0; j < m; ++j) qe[j] = q[j] + dt * (v[j] + 0.5 * dt * a2[j]);
        const std::vector<double> a4 = detail::accelerations(qe, problem);

        for (std::size_t j = 0; j < m; ++j) {
            const double k1v = a1[j], k2v = a2[j], k3v = a3[j], k4v = a4[j];
            const double k1q = v[j];
            const double k2q = v[j] + 0.5 * dt * k1v;
            const double k3q = v[j] + 0.5 * dt * k2v;
            const double k4q = v[j] + dt * k3v;
            q[j] += (dt / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
            v[j] += (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            if (!std::isfinite(q[j]) || !std::isfinite(v[j]))
                throw std::runtime_error("rk4_flow: non-finite state");
        }
        out.times.push_back(dt * static_cast<double>(n + 1));
        out.positions.push_back(q);
        out.velocities.push_back(v);
    }
    return out;
}

/// Max node deviation between the discrete trajectory and the RK4 flow
/// started from its node-0 position and centered-difference velocity.
inline double compare_to_flow(const Trajectory& traj, long substeps_per_node = 16) {
    const ProblemSpec& p = traj.spec;
    const double h = p.step();
    const std::size_t m = static_cast<std::size_t>(p.n_bodies) * p.dim;

    std::vector<double> q0(m), v0(m);
    for (int i = 0; i < p.n_bodies; ++i)
        for (int c = 0; c < p.dim; ++c) {
            q0[static_cast<std::size_t>(i) * p.dim + c] = traj.at(0, i, c);
            v0[static_cast<std::size_t>(i) * p.dim + c] =
                (traj.at(1, i, c) - traj.at(-1, i, c)) / (2.0 * h);
        }

    const long steps = substeps_per_node * p.k;
    const FlowResult flow = rk4_flow(q0, v0, p, steps, p.period);

    double worst = 0.0;
    for (int s = 0; s < p.k; ++s) {
        const std::vector<double>& fq = flow.positions[static_cast<std::size_t>(s) * substeps_per_node];
        double dev2 = 0.0;
        for (int i = 0; i < p.n_bodies; ++i)
            for (int c = 0; c < p.dim; ++c) {
                const double diff = fq[static_cast<std::size_t>(i) * p.dim + c] - traj.at(s, i, c);
                dev2 += diff * diff;
            }
        worst = std::max(worst, std::sqrt(dev2));
    }
    return worst;
}

}  // namespace nbody

// Steepest descent with backtracking (Armijo) line search over the
// symmetry-reduced variables. Trial steps that create a coincident pair are
// treated as failed Armijo trials and shrunk.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbody/action.hpp"
#include "nbody/core.hpp"
#include "nbody/symmetry.hpp"

namespace nbody {

struct OptimizerConfig {
    int max_iters = 50000;
    double grad_tol = 1e-8;   // effective tolerance is grad_tol * max(1, |J0|)
    double step_init = 1.0;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    double step_floor = 1e-16;
    std::uint64_t seed = 0;
    double init_radius = 1.0;

    void validate() const {
        if (max_iters < 1) throw SpecError("max_iters must be positive");
        if (!(grad_tol > 0.0)) throw SpecError("grad_tol must be positive");
        if (!(step_init > 0.0)) throw SpecError("step_init must be positive");
        if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw SpecError("armijo_c must be in (0,1)");
        if (!(backtrack > 0.0 && backtrack < 1.0)) throw SpecError("backtrack must be in (0,1)");
        if (!(step_floor > 0.0)) throw SpecError("step_floor must be positive");
        if (!(init_radius >= 0.0)) throw SpecError("init_radius must be nonnegative");
    }
};

struct OrbitReport {
    double j = 0.0;
    double grad_norm = 0.0;  // reduced-gradient norm at the final iterate
    int iters = 0;
    bool converged = false;
    std::string stop_reason;
    PairSeparation min_sep;
    double energy_mean = 0.0;
    double energy_max_dev = 0.0;
    double residual_norm = 0.0;  // full-trajectory (N1) residual norm

    ProblemSpec problem;
    SymmetrySpec symmetry;
    OptimizerConfig config;
};

/// Reduced vector with i.i.d. uniform entries on [-init_radius, init_radius].
/// Engine is mt19937_64; doubles are drawn as (x >> 11) * 2^-53, so identical
/// (seed, shapes) give identical output bit for bit on any platform.
inline ReducedVector random_init(const ProblemSpec& problem, const SymmetrySpec& sym,
                                 std::uint64_t seed, double init_radius = 1.0) {
    problem.validate();
    sym.validate(problem);
    std::mt19937_64 eng(seed);
    ReducedVector out;
    out.data.resize(sym.reduced_size(problem));
    for (double& v : out.data) {
        const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;  // [0,1)
        v = (2.0 * u - 1.0) * init_radius;
    }
    return out;
}

/// Observer called on every accepted iterate (including the start point).
using IterateObserver = std::function<void(int iter, const ReducedVector& red, double j)>;

/// Minimize J over the reduced variables by steepest descent.
inline std::pair<ReducedVector, OrbitReport> minimize(const ReducedVector& red0,
                                                      const ProblemSpec& problem,
                                                      const SymmetrySpec& sym,
                                                      const OptimizerConfig& config,
                                                      const IterateObserver& observer = {}) {
    problem.validate();
    sym.validate(problem);
    config.validate();

    struct Eval {
        double j;
        ReducedVector grad;
    };
    auto evaluate = [&](const ReducedVector& red) -> Eval {
        const Trajectory traj = reconstruct(red, sym, problem);
        ActionReport rep = action(traj);
        return Eval{rep.j, reduce_gradient(rep.grad, sym, problem)};
    };

    {
        const Trajectory t0 = reconstruct(red0, sym, problem);
        if (problem.n_bodies >= 2 && !(min_separation(t0).r > 0.0))
            throw SingularityError();
    }

    ReducedVector red = red0;
    Eval cur = evaluate(red);
    if (!std::isfinite(cur.j)) throw std::runtime_error("minimize: non-finite J at start point");
    const double tol = config.grad_tol * std::max(1.0, std::abs(cur.j));

    OrbitReport rep;
    rep.problem = problem;
    rep.symmetry = sym;
    rep.config = config;

    if (observer) observer(0, red, cur.j);

    int iter = 0;
    std::string reason;
    bool converged = false;
    double gn = cur.grad.norm();
    while (true) {
        if (gn < tol) {
            converged = true;
            reason = "grad_tol";
            break;
        }
        if (iter >= config.max_iters) {
            reason = "max_iters";
            break;
        }
        double t = config.step_init;
        bool accepted = false;
        ReducedVector trial;
        while (t >= config.step_floor) {
            trial.data = red.data;
            for (std::size_t n = 0; n < trial.data.size(); ++n)
                trial.data[n] -= t * cur.grad.data[n];
            double jt;
            bool ok = true;
            try {
                const Trajectory tt = reconstruct(trial, sym, problem);
                jt = action(tt).j;
                if (!std::isfinite(jt)) ok = false;
            } catch (const SingularityError&) {
                ok = false;  // coincident pair on the trial path: shrink
            }
            if (ok && jt <= cur.j - config.armijo_c * t * gn * gn) {
                red = std::move(trial);
                cur = evaluate(red);
                gn = cur.grad.norm();
                ++iter;
                if (observer) observer(iter, red, cur.j);
                accepted = true;
                break;
            }
            t *= config.backtrack;
        }
        if (!accepted) {
            reason = "step_floor";
            break;
        }
    }

    const Trajectory final_traj = reconstruct(red, sym, problem);
    rep.j = cur.j;
    rep.grad_norm = gn;
    rep.iters = iter;
    rep.converged = converged;
    rep.stop_reason = reason;
    if (problem.n_bodies >= 2) rep.min_sep = min_separation(final_traj);
    const EnergySeries es = discrete_energy(final_traj);
    rep.energy_mean = es.mean;
    rep.energy_max_dev = es.max_dev;
    rep.residual_norm = residual_n1(final_traj).norm;
    return {std::move(red), std::move(rep)};
}

}  // namespace nbody

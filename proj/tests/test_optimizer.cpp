#include <doctest.h>

#include <cmath>
#include <vector>

#include "nbody/optimizer.hpp"
#include "nbody/reference.hpp"
#include "test_helpers.hpp"

using namespace nbody;

namespace {

ProblemSpec planar_three_body(int k = 24, double delta = 0.05) {
    ProblemSpec p = test_util::basic_spec(3, 2, k, 2.0 * 3.141592653589793, delta);
    return p;
}

}  // namespace

TEST_CASE("random_init is deterministic in the seed") {
    const ProblemSpec p = planar_three_body();
    const SymmetrySpec sym{{{2, 2}}};
    const ReducedVector a = random_init(p, sym, 42);
    const ReducedVector b = random_init(p, sym, 42);
    REQUIRE(a.data.size() == sym.reduced_size(p));
    CHECK(a.data == b.data);

    const ReducedVector c = random_init(p, sym, 43);
    bool differs = false;
    for (std::size_t n = 0; n < a.data.size(); ++n) differs = differs || (a.data[n] != c.data[n]);
    CHECK(differs);

    const ReducedVector z = random_init(p, sym, 42, 0.0);
    for (double v : z.data) CHECK(v == 0.0);

    for (double v : random_init(p, sym, 7, 2.5).data) {
        CHECK(v >= -2.5);
        CHECK(v <= 2.5);
    }
}

TEST_CASE("minimize stops immediately at a critical point") {
    // A converged run restarted from its own minimizer takes zero iterations,
    // provided the restart's effective tolerance (grad_tol * max(1, |J0|),
    // with J0 now the minimum value) sits above the final gradient norm.
    const ProblemSpec p = planar_three_body(16);
    const SymmetrySpec sym{{{2, 2}}};
    OptimizerConfig cfg;
    cfg.seed = 1;
    auto [red, rep] = minimize(random_init(p, sym, 1), p, sym, cfg);
    REQUIRE(rep.converged);
    OptimizerConfig restart = cfg;
    restart.grad_tol = 2.0 * rep.grad_norm / std::max(1.0, std::abs(rep.j));
    auto [red2, rep2] = minimize(red, p, sym, restart);
    CHECK(rep2.converged);
    CHECK(rep2.iters == 0);
}

TEST_CASE("minimize rejects an initial collision") {
    const ProblemSpec p = planar_three_body();
    const SymmetrySpec sym{{{2, 2}}};
    ReducedVector zero;
    zero.data.assign(sym.reduced_size(p), 0.0);  // all bodies at the origin
    CHECK_THROWS_AS(minimize(zero, p, sym, OptimizerConfig{}), SingularityError);
}

TEST_CASE("accepted J values are strictly non-increasing") {
    const ProblemSpec p = planar_three_body();
    const SymmetrySpec sym{{{2, 2}}};
    OptimizerConfig cfg;
    cfg.seed = 5;
    cfg.max_iters = 2000;
    std::vector<double> js;
    minimize(random_init(p, sym, 5), p, sym, cfg,
             [&](int, const ReducedVector&, double j) { js.push_back(j); });
    REQUIRE(js.size() > 2);
    for (std::size_t n = 1; n < js.size(); ++n) CHECK(js[n] < js[n - 1]);
}

TEST_CASE("every iterate's reconstruction satisfies the symmetry exactly") {
    const ProblemSpec p = planar_three_body();
    const SymmetrySpec sym{{{2, 2}}};
    OptimizerConfig cfg;
    cfg.seed = 9;
    cfg.max_iters = 500;
    double worst = 0.0;
    minimize(random_init(p, sym, 9), p, sym, cfg, [&](int, const ReducedVector& red, double) {
        worst = std::max(worst, check_symmetry(reconstruct(red, sym, p), sym));
    });
    CHECK(worst == 0.0);
}

TEST_CASE("determinism: identical inputs give identical reports") {
    const ProblemSpec p = planar_three_body();
    const SymmetrySpec sym{{{2, 2}}};
    OptimizerConfig cfg;
    cfg.seed = 3;
    cfg.max_iters = 3000;
    auto [r1, rep1] = minimize(random_init(p, sym, 3), p, sym, cfg);
    auto [r2, rep2] = minimize(random_init(p, sym, 3), p, sym, cfg);
    CHECK(r1.data == r2.data);
    CHECK(rep1.j == rep2.j);
    CHECK(rep1.iters == rep2.iters);
    CHECK(rep1.grad_norm == rep2.grad_norm);
}

TEST_CASE("two-body equal-mass planar problem converges to a circular-type orbit") {
    ProblemSpec p = test_util::basic_spec(2, 2, 32, 2.0 * 3.141592653589793, 0.0);
    const SymmetrySpec sym{{{2, 2}}};
    OptimizerConfig cfg;
    cfg.seed = 11;
    auto [red, rep] = minimize(random_init(p, sym, 11), p, sym, cfg);
    REQUIRE(rep.converged);
    CHECK(rep.min_sep.r > 0.1);
    // Critical point: full residual is the reduced gradient's preimage; it is
    // small, and the discrete energy is nearly constant along the orbit.
    CHECK(rep.residual_norm < 1e-5 * std::max(1.0, std::abs(rep.j)));
    CHECK(rep.energy_max_dev < 0.05 * std::max(1.0, std::abs(rep.energy_mean)));

    // Relative separation is close to constant (near-circular relative orbit).
    const Trajectory traj = reconstruct(red, sym, p);
    double rmin = 1e300, rmax = 0.0;
    for (int s = 0; s < p.k; ++s) {
        double r2 = 0.0;
        for (int c = 0; c < 2; ++c) {
            const double diff = traj.at(s, 0, c) - traj.at(s, 1, c);
            r2 += diff * diff;
        }
        rmin = std::min(rmin, std::sqrt(r2));
        rmax = std::max(rmax, std::sqrt(r2));
    }
    CHECK(rmax / rmin < 1.2);
}

TEST_CASE("energy deviation decreases after grid doubling of a minimizer") {
    const ProblemSpec p = planar_three_body(30);
    const SymmetrySpec sym{{{2, 2}}};
    OptimizerConfig cfg;
    cfg.seed = 3;
    auto [red, rep] = minimize(random_init(p, sym, 3), p, sym, cfg);
    REQUIRE(rep.converged);
    const Trajectory fine0 = refine_double_nodes(reconstruct(red, sym, p));
    // The warm start is already near the minimizer, so the default tolerance
    // (rescaled by the now-small |J0|) would demand a far tighter gradient
    // than the cold-started coarse run; loosen it to a comparable level.
    OptimizerConfig fine_cfg = cfg;
    fine_cfg.grad_tol = 1e-7;
    auto [redf, repf] = minimize(restrict_to_domain(fine0, sym), fine0.spec, sym, fine_cfg);
    REQUIRE(repf.converged);
    CHECK(repf.energy_max_dev < rep.energy_max_dev);
}

TEST_CASE("with the strong-force cutoff active, minimizers stay separated") {
    ProblemSpec p = planar_three_body(24, 0.1);
    const SymmetrySpec sym{{{2, 2}}};
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        OptimizerConfig cfg;
        cfg.seed = seed;
        auto [red, rep] = minimize(random_init(p, sym, seed), p, sym, cfg);
        if (rep.converged) CHECK(rep.min_sep.r > 0.5 * p.delta);
    }
}

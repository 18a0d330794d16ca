#include <doctest.h>

#include <cmath>

#include "nbody/action.hpp"
#include "nbody/reference.hpp"
#include "nbody/symmetry.hpp"
#include "test_helpers.hpp"

using namespace nbody;

TEST_CASE("Lagrange orbit force balance") {
    const LagrangeOrbit o = LagrangeOrbit::make(2.0, 1.5);
    CHECK(o.omega * o.omega * o.side * o.side * o.side == doctest::Approx(3.0 * 2.0));
    CHECK(o.circumradius() == doctest::Approx(1.5 / std::sqrt(3.0)));
    CHECK(o.period == doctest::Approx(2.0 * 3.141592653589793 / o.omega));
}

TEST_CASE("sampled Lagrange orbit is equilateral at every node") {
    const LagrangeOrbit o = LagrangeOrbit::make(1.0, 1.0);
    const Trajectory traj = sample_lagrange(o, 48);
    for (int s = 0; s < 48; ++s)
        for (int i = 0; i < 3; ++i)
            for (int l = i + 1; l < 3; ++l) {
                double r2 = 0.0;
                for (int c = 0; c < 2; ++c) {
                    const double diff = traj.at(s, i, c) - traj.at(s, l, c);
                    r2 += diff * diff;
                }
                CHECK(std::sqrt(r2) == doctest::Approx(1.0).epsilon(1e-12));
            }
}

TEST_CASE("sampled Lagrange orbit satisfies the planar A=2 symmetry") {
    const LagrangeOrbit o = LagrangeOrbit::make(1.0, 1.0);
    const Trajectory traj = sample_lagrange(o, 64);
    const SymmetrySpec sym{{{2, 2}}};
    CHECK(check_symmetry(traj, sym) < 1e-14);
}

TEST_CASE("sampled Lagrange residual shrinks under refinement") {
    const LagrangeOrbit o = LagrangeOrbit::make(1.0, 1.0);
    const double n64 = residual_n1(sample_lagrange(o, 64)).norm;
    const double n128 = residual_n1(sample_lagrange(o, 128)).norm;
    CHECK(n128 < n64);
    // Action gradient norm tends to zero with k (discrete critical point).
    CHECK(action(sample_lagrange(o, 256)).grad_norm < n64);
}

TEST_CASE("rk4_flow closes the Lagrange orbit over one period") {
    const LagrangeOrbit o = LagrangeOrbit::make(1.0, 1.0);
    const Trajectory traj = sample_lagrange(o, 16);
    const ProblemSpec& p = traj.spec;
    const double R = o.circumradius();

    std::vector<double> q0(6), v0(6);
    for (int i = 0; i < 3; ++i) {
        const double th = 2.0 * 3.141592653589793 * i / 3.0;
        q0[i * 2 + 0] = R * std::cos(th);
        q0[i * 2 + 1] = R * std::sin(th);
        // Velocity tangent to the circle, speed omega * R.
        v0[i * 2 + 0] = -o.omega * R * std::sin(th);
        v0[i * 2 + 1] = o.omega * R * std::cos(th);
    }
    const FlowResult flow = rk4_flow(q0, v0, p, 4096, o.period);
    double dev = 0.0;
    for (int j = 0; j < 6; ++j) dev = std::max(dev, std::abs(flow.positions.back()[j] - q0[j]));
    CHECK(dev < 1e-6 * o.side);
}

TEST_CASE("rk4_flow conserves energy and momentum") {
    const LagrangeOrbit o = LagrangeOrbit::make(1.0, 1.0);
    const Trajectory traj = sample_lagrange(o, 16);
    const ProblemSpec& p = traj.spec;
    const double R = o.circumradius();

    std::vector<double> q0(6), v0(6);
    for (int i = 0; i < 3; ++i) {
        const double th = 2.0 * 3.141592653589793 * i / 3.0;
        q0[i * 2 + 0] = R * std::cos(th);
        q0[i * 2 + 1] = R * std::sin(th);
        v0[i * 2 + 0] = -o.omega * R * std::sin(th);
        v0[i * 2 + 1] = o.omega * R * std::cos(th);
    }

    auto energy = [&](const std::vector<double>& q, const std::vector<double>& v) {
        double e = 0.0;
        for (int i = 0; i < 3; ++i)
            e += 0.5 * (v[i * 2] * v[i * 2] + v[i * 2 + 1] * v[i * 2 + 1]);
        for (int i = 0; i < 3; ++i)
            for (int l = i + 1; l < 3; ++l) {
                const double dx = q[i * 2] - q[l * 2], dy = q[i * 2 + 1] - q[l * 2 + 1];
                e += pair_potential(std::sqrt(dx * dx + dy * dy), 1.0, 1.0, 1.0);
            }
        return e;
    };

    const FlowResult flow = rk4_flow(q0, v0, p, 4096, o.period);
    const double e0 = energy(q0, v0);
    double drift = 0.0;
    for (std::size_t n = 0; n < flow.positions.size(); ++n)
        drift = std::max(drift, std::abs(energy(flow.positions[n], flow.velocities[n]) - e0));
    CHECK(drift < 1e-8 * std::abs(e0));

    for (int c = 0; c < 2; ++c) {
        double p0 = 0.0, p1 = 0.0;
        for (int i = 0; i < 3; ++i) {
            p0 += v0[i * 2 + c];
            p1 += flow.velocities.back()[i * 2 + c];
        }
        CHECK(std::abs(p1 - p0) < 1e-10);
    }
}

TEST_CASE("zero-velocity two-body flow stays on the connecting line") {
    ProblemSpec p = test_util::basic_spec(2, 2, 4, 1.0);
    std::vector<double> q0 = {-1.0, 0.0, 1.0, 0.0};
    std::vector<double> v0 = {0.0, 0.0, 0.0, 0.0};
    const FlowResult flow = rk4_flow(q0, v0, p, 200, 0.5);
    for (const auto& q : flow.positions) {
        CHECK(q[1] == 0.0);
        CHECK(q[3] == 0.0);
        CHECK(q[0] == doctest::Approx(-q[2]).epsilon(1e-12));  // symmetric collapse
    }
}

TEST_CASE("compare_to_flow deviation decreases roughly as h^2 on the Lagrange orbit") {
    const LagrangeOrbit o = LagrangeOrbit::make(1.0, 1.0);
    const double d64 = compare_to_flow(sample_lagrange(o, 64));
    const double d128 = compare_to_flow(sample_lagrange(o, 128));
    const double order = std::log2(d64 / d128);
    CHECK(order > 1.8);
}

// Problem definition and discrete periodic trajectory representation.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nbody {

/// A pair of bodies coincided at a time node; the potential is singular there.
class SingularityError : public std::runtime_error {
public:
    SingularityError(long node, int body_a, int body_b)
        : std::runtime_error("singularity: bodies " + std::to_string(body_a) + " and " +
                             std::to_string(body_b) + " coincide at node " + std::to_string(node)),
          node(node), body_a(body_a), body_b(body_b) {}
    SingularityError() : std::runtime_error("singularity: zero separation"), node(-1), body_a(-1), body_b(-1) {}

    long node;
    int body_a, body_b;
};

/// Invalid problem / symmetry specification.
class SpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ProblemSpec {
    int n_bodies = 0;                // N
    int dim = 0;                     // d
    std::vector<double> masses;      // m_i, one per body
    double alpha = 1.0;              // potential exponent
    double period = 1.0;             // T
    int k = 0;                       // time nodes per period
    double delta = 0.0;              // strong-force cutoff radius; 0 disables
    double g_const = 1.0;            // G, fixed to 1

    // Uniform step; always derived from period and k.
    double step() const { return period / static_cast<double>(k); }

    void validate() const {
        if (n_bodies < 1) throw SpecError("n_bodies must be positive");
        if (dim < 1) throw SpecError("dim must be positive");
        if (static_cast<int>(masses.size()) != n_bodies)
            throw SpecError("masses must have one entry per body");
        for (double m : masses)
            if (!(m > 0.0)) throw SpecError("masses must be strictly positive");
        if (!(alpha > 0.0)) throw SpecError("alpha must be positive");
        if (!(period > 0.0)) throw SpecError("period must be positive");
        if (k < 3) throw SpecError("k must be at least 3");
        if (!(delta >= 0.0)) throw SpecError("delta must be nonnegative");
        if (!(g_const > 0.0)) throw SpecError("g_const must be positive");
    }
};

/// Minimum pairwise separation record: bodies i < l at node s, distance r.
struct PairSeparation {
    int s = 0;
    int i = 0;
    int l = 0;
    double r = 0.0;
};

/// Discrete periodic trajectory: k nodes x N bodies x d coordinates, time-major.
/// Node indices wrap modulo k, so the periodic closure is structural.
class Trajectory {
public:
    Trajectory() = default;

    Trajectory(ProblemSpec spec_, std::vector<double> values)
        : spec(std::move(spec_)), values_(std::move(values)) {
        spec.validate();
        const std::size_t want =
            static_cast<std::size_t>(spec.k) * spec.n_bodies * spec.dim;
        if (values_.size() != want) throw SpecError("trajectory value count mismatch");
        for (double v : values_)
            if (!std::isfinite(v)) throw SpecError("trajectory contains non-finite values");
    }

    static Trajectory zeros(ProblemSpec spec) {
        spec.validate();
        std::vector<double> v(static_cast<std::size_t>(spec.k) * spec.n_bodies * spec.dim, 0.0);
        return Trajectory(std::move(spec), std::move(v));
    }

    ProblemSpec spec;

    int nodes() const { return spec.k; }

    // Node index wrapped modulo k (negative indices allowed).
    double at(long s, int body, int coord) const {
        return values_[index(s, body, coord)];
    }
    double& at(long s, int body, int coord) {
        return values_[index(s, body, coord)];
    }

    const std::vector<double>& raw() const { return values_; }
    std::vector<double>& raw() { return values_; }

    std::size_t index(long s, int body, int coord) const {
        const long k = spec.k;
        const long w = ((s % k) + k) % k;
        return (static_cast<std::size_t>(w) * spec.n_bodies + body) * spec.dim + coord;
    }

private:
    std::vector<double> values_;
};

/// Piecewise-linear value of the trajectory at time t in [0, T].
/// Node s sits at time s*h; segment k-1 closes back onto node 0.
inline std::vector<double> interpolate(const Trajectory& traj, double t) {
    const double T = traj.spec.period;
    if (!(t >= 0.0 && t <= T)) throw std::domain_error("interpolate: t outside [0, T]");
    const double h = traj.spec.step();
    const int n = traj.spec.n_bodies, d = traj.spec.dim;

    long s0 = static_cast<long>(std::floor(t / h));
    if (s0 >= traj.spec.k) s0 = traj.spec.k - 1;  // t == T
    // Land exactly on a node when t matches it bit-for-bit.
    double frac;
    if (t - static_cast<double>(s0) * h == 0.0) {
        frac = 0.0;
    } else if (t - static_cast<double>(s0 + 1) * h == 0.0) {
        s0 += 1;
        frac = 0.0;
    } else {
        frac = (t - static_cast<double>(s0) * h) / h;
    }

    std::vector<double> out(static_cast<std::size_t>(n) * d);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < d; ++c) {
            const double a = traj.at(s0, i, c);
            if (frac == 0.0) {
                out[static_cast<std::size_t>(i) * d + c] = a;
            } else {
                const double b = traj.at(s0 + 1, i, c);
                out[static_cast<std::size_t>(i) * d + c] = a + frac * (b - a);
            }
        }
    return out;
}

/// Minimum over all nodes and body pairs of the pairwise distance.
/// Ties broken by smallest (s, i, l) lexicographically.
inline PairSeparation min_separation(const Trajectory& traj) {
    const int n = traj.spec.n_bodies, d = traj.spec.dim;
    if (n < 2) throw std::domain_error("min_separation: need at least two bodies");
    PairSeparation best;
    best.r = -1.0;
    for (int s = 0; s < traj.spec.k; ++s)
        for (int i = 0; i < n; ++i)
            for (int l = i + 1; l < n; ++l) {
                double r2 = 0.0;
                for (int c = 0; c < d; ++c) {
                    const double diff = traj.at(s, l, c) - traj.at(s, i, c);
                    r2 += diff * diff;
                }
                const double r = std::sqrt(r2);
                if (best.r < 0.0 || r < best.r) best = PairSeparation{s, i, l, r};
            }
    return best;
}

/// Grid refinement: double the node count, inserting segment midpoints.
/// Period is unchanged; the refined path traces the same polygon.
inline Trajectory refine_double_nodes(const Trajectory& traj) {
    ProblemSpec p = traj.spec;
    const int k = p.k, n = p.n_bodies, d = p.dim;
    p.k = 2 * k;
    std::vector<double> v(static_cast<std::size_t>(2 * k) * n * d);
    for (int s = 0; s < k; ++s)
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < d; ++c) {
                const double a = traj.at(s, i, c);
                const double b = traj.at(s + 1, i, c);
                v[(static_cast<std::size_t>(2 * s) * n + i) * d + c] = a;
                v[(static_cast<std::size_t>(2 * s + 1) * n + i) * d + c] = 0.5 * (a + b);
            }
    return Trajectory(std::move(p), std::move(v));
}

}  // namespace nbody

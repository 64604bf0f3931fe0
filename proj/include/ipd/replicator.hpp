#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "ipd/game.hpp"

namespace ipd {

// Population shares of the three strategies, in the fixed order
// 0 = Cooperator, 1 = Defector, 2 = TitForTat; sums to 1.
using Vec3 = std::array<double, 3>;

struct ReplicatorMatrix {
    std::array<Vec3, 3> a{};
    double omega = 0.0;  // continuation probability the matrix was built with

    const Vec3& row(int i) const { return a[i]; }
};

// Expected per-interaction payoffs between Cooperator, Defector and
// TitForTat in the repeated game with continuation probability omega.  The
// only discounted entries are D vs TFT: the defector earns t once and p
// afterwards, the TFT player s once and p afterwards.
ReplicatorMatrix build_full_matrix(const GameParams& g, double omega);

// Subtracts the first row's entry from every column, zeroing row 0.  Leaves
// the replicator dynamics unchanged (payoff differences are preserved).
ReplicatorMatrix reduce_matrix(const ReplicatorMatrix& m);

// xdot_i = x_i * ((Ax)_i - x.Ax)
Vec3 replicator_rhs(const Vec3& x, const ReplicatorMatrix& m);

struct StepTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegrateOptions {
    double step = 0.01;
    double horizon = 500.0;
    long record_every = 1;  // keep every k-th step (plus the final state)
};

struct Trajectory {
    std::vector<double> t;
    std::vector<Vec3> x;
    double max_drift = 0.0;  // largest |sum(x) - 1| seen before renormalizing
};

// Fixed-step RK4 from x0 (must lie on the simplex within 1e-9).  Each step is
// renormalized back onto the simplex; a component escaping [-1e-6, 1 + 1e-6]
// before renormalization raises StepTooLarge.
Trajectory integrate(const Vec3& x0, const ReplicatorMatrix& m, const IntegrateOptions& opts);

// Same integration without recording; returns the state at the horizon.
Vec3 final_state(const Vec3& x0, const ReplicatorMatrix& m, const IntegrateOptions& opts);

// Zero set of (Ax)_i - (Ax)_j on the simplex, written in the reduced
// coordinates (x2, x3) with x1 = 1 - x2 - x3:  c0 + c2*x2 + c3*x3 = 0.
struct IndifferenceLine {
    int i = 0;
    int j = 0;
    double c0 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    bool degenerate = false;  // identically zero: the payoffs agree everywhere
};

std::vector<IndifferenceLine> indifference_lines(const ReplicatorMatrix& m);

struct FixedPointReport {
    enum class Kind { Vertex, Edge, EdgeLine, Interior };
    enum class Stability { Attracting, Repelling, Saddle, Neutral };

    Kind kind = Kind::Vertex;
    Stability stability = Stability::Neutral;
    Vec3 location{0.0, 0.0, 0.0};
    int vertex = -1;  // Vertex: which corner
    int edge_i = -1;  // Edge / EdgeLine: endpoints of the carrying edge
    int edge_j = -1;
    std::array<double, 2> eig_re{0.0, 0.0};  // Jacobian spectrum on the simplex
    std::array<double, 2> eig_im{0.0, 0.0};
};

// Vertices, isolated edge fixed points, whole fixed edges (neutral lines),
// and an interior fixed point when one exists.  Stability comes from the
// analytic Jacobian restricted to the simplex; real parts within 1e-9 of
// zero are classified neutral.
std::vector<FixedPointReport> classify_fixed_points(const ReplicatorMatrix& m);

}  // namespace ipd

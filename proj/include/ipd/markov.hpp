#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

#include "ipd/game.hpp"

namespace ipd {

using Vec4 = std::array<double, 4>;

// Memory-one strategy: cooperation probability conditioned on the previous
// round's outcome in the owner's own view (CC, CD, DC, DD).
struct StrategyVector {
    Vec4 p{0.0, 0.0, 0.0, 0.0};

    double operator[](Outcome o) const { return p[static_cast<int>(o)]; }
    double& operator[](Outcome o) { return p[static_cast<int>(o)]; }
};

// True iff every component lies in [0, 1] within tol.
bool is_probability_vector(const StrategyVector& v, double tol = 1e-12);

// Throws std::invalid_argument otherwise.
void require_probability_vector(const StrategyVector& v, double tol = 1e-12);

// Row-stochastic 4x4 matrix over outcome states in X's view.
struct TransitionMatrix {
    std::array<Vec4, 4> m{};

    const Vec4& row(Outcome o) const { return m[static_cast<int>(o)]; }
    double operator()(int i, int j) const { return m[i][j]; }
};

// Joint chain of X playing p against Y playing q.  Both strategies are given
// in their owner's own view; the swap of CD/DC needed to look up Y's response
// happens internally.
TransitionMatrix build_transition_matrix(const StrategyVector& p, const StrategyVector& q);

// Strong connectivity of the directed graph with an edge i -> j whenever
// M(i,j) > edge_tol.
bool is_irreducible(const TransitionMatrix& m, double edge_tol = 1e-12);

// Number of closed communicating classes (classes with no escaping edge).
// 1 means the stationary distribution is unique even if the chain is
// reducible; >1 means long-run behaviour depends on the start.
int closed_class_count(const TransitionMatrix& m, double edge_tol = 1e-12);

struct PowerIterationOptions {
    double damping = 0.0;     // lazy blend: v <- (1-damping)*vM + damping*v
    double tol = 1e-12;       // max-norm change defining convergence
    long max_iterations = 1000000;
};

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StationaryResult {
    Vec4 v{0.0, 0.0, 0.0, 0.0};
    // True when the chain was irreducible, which certifies uniqueness.  When
    // false the vector is the limit of power iteration from the uniform start
    // and need not be the only stationary distribution.
    bool unique = false;
    enum class Route { LinearSolve, PowerIteration } route = Route::LinearSolve;
    long iterations = 0;  // power-iteration steps taken (0 on the solve route)
};

// Stationary distribution of a row-stochastic matrix.  Irreducible chains are
// solved exactly via the rank-3 linear system with a normalization row;
// reducible chains fall back to (optionally damped) power iteration from the
// uniform start and are flagged non-unique.  Throws NonConvergence if the
// iteration cap is hit (periodic reducible chains can oscillate forever when
// damping is 0).
StationaryResult stationary_distribution(const TransitionMatrix& m,
                                         const PowerIterationOptions& opts = {});

// A pair of long-run per-round scores.
struct ScorePair {
    double s_x = 0.0;
    double s_y = 0.0;
};

// Per-round score vectors over outcomes in X's view: X earns s_x, Y earns s_y.
struct ScoreVectors {
    Vec4 s_x;  // (r, s, t, p)
    Vec4 s_y;  // (r, t, s, p)
};

ScoreVectors score_vectors(const GameParams& g);

// The 4x4 determinant D(p, q, f) whose ratio D(p,q,f)/D(p,q,1) equals the
// stationary average of f when the joint chain has a unique stationary
// distribution.  Linear in f.
double determinant_form(const StrategyVector& p, const StrategyVector& q, const Vec4& f);

enum class ScoreRoute { Auto, Determinant, Stationary };

struct ScoreResult {
    double s_x = 0.0;
    double s_y = 0.0;
    ScoreRoute route = ScoreRoute::Determinant;  // route actually taken
    // Set when the chain has multiple closed classes: the long-run average
    // depends on the start, and the reported value is the power-iteration
    // limit from the uniform start.
    bool degenerate = false;
};

// Long-run per-round expected scores of p against q.  route Auto uses the
// determinant ratio when |D(p,q,1)| > 1e-9 and the stationary distribution
// otherwise; either path can be forced for cross-checking.
ScoreResult expected_scores(const StrategyVector& p, const StrategyVector& q,
                            const GameParams& g, ScoreRoute route = ScoreRoute::Auto);

}  // namespace ipd

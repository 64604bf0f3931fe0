#pragma once

#include <stdexcept>
#include <vector>

#include "ipd/game.hpp"
#include "ipd/markov.hpp"

namespace ipd {

// A strategy component that falls outside [0, 1]: which component (0-based
// index into (p1..p4)), the value obtained, and the bound it breaks.
struct Violation {
    int component;
    double value;
    double bound;  // 0.0 when value < 0, 1.0 when value > 1
};

struct Feasibility {
    std::vector<Violation> violations;
    bool feasible() const { return violations.empty(); }
};

// Checks each component against [0, 1] with tolerance tol and records every
// offender.
Feasibility check_feasibility(const StrategyVector& p, double tol = 1e-12);

// Targets the linear payoff relation alpha*s_x + beta*s_y + gamma = 0.
// (alpha, beta) must not both be zero.
struct LinearConstraint {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
};

// Candidate strategy for a linear constraint: p_hat = alpha*S_x + beta*S_y +
// gamma*1, shifted by (1, 1, 0, 0).  The candidate is always returned so an
// infeasible attempt can be reported component by component.
struct ZdCandidate {
    StrategyVector p;
    Feasibility feasibility;
    bool ok() const { return feasibility.feasible(); }
};

ZdCandidate zd_from_constraint(const LinearConstraint& c, const GameParams& g);

// Raised when the requested (p1, p4) pair pins the opponent's score formula
// to 0/0: p4 + (1 - p1) = 0 enforces nothing.
struct DegenerateTarget : std::domain_error {
    using std::domain_error::domain_error;
};

// Strategy that fixes the opponent's long-run score regardless of the
// opponent's play, parameterized by free choices p1, p4 in [0, 1].
struct SetScoreResult {
    StrategyVector p;
    double s_y = 0.0;   // the score enforced on the opponent
    double beta = 0.0;  // underlying constraint coefficients (alpha = 0)
    double gamma = 0.0;
    Feasibility feasibility;
    bool ok() const { return feasibility.feasible(); }
};

SetScoreResult set_opponent_score(double p1, double p4, const GameParams& g);

// The only memory-one strategy that would fix its *own* score this way; the
// probabilities (1, 1, 0, 0) are degenerate (Repeat/win-stay-lose-shift on
// the opponent's move), so no score is actually enforced.
StrategyVector own_score_strategy(const GameParams& g);

struct ExtortionParams {
    double chi = 2.0;  // extortion factor, >= 1
    double phi = 0.1;  // scale, in (0, phi_upper_bound(chi)]
};

// Largest phi for which the extortionate strategy stays inside [0, 1]^4:
// min of (p-s)/(chi*(t-p) + (p-s)) and (p-s)/(chi*(p-s) + (t-p)).  Which
// branch binds flips with the sign of t + s - 2p.
double phi_upper_bound(double chi, const GameParams& g);

// Extortionate strategy enforcing s_x - p = chi*(s_y - p).  chi must be >= 1
// (throws std::invalid_argument otherwise); phi <= 0 or any component outside
// [0, 1] yields an infeasible candidate with the offending components listed.
struct ExtortionResult {
    StrategyVector p;
    bool phi_positive = true;
    Feasibility feasibility;
    bool ok() const { return phi_positive && feasibility.feasible(); }
};

ExtortionResult extortionate(const ExtortionParams& params, const GameParams& g);

// Scores when the opponent of an extortionate strategy fully cooperates (the
// opponent's best response); independent of phi.
ScorePair extortion_best_case(double chi, const GameParams& g);

}  // namespace ipd

#include "ipd/zd.hpp"

#include <cmath>

namespace ipd {

Feasibility check_feasibility(const StrategyVector& p, double tol) {
    Feasibility f;
    for (int i = 0; i < 4; ++i) {
        const double v = p.p[i];
        if (!(v >= -tol)) {
            f.violations.push_back(Violation{i, v, 0.0});
        } else if (!(v <= 1.0 + tol)) {
            f.violations.push_back(Violation{i, v, 1.0});
        }
    }
    return f;
}

ZdCandidate zd_from_constraint(const LinearConstraint& c, const GameParams& g) {
    require_valid(g);
    if (c.alpha == 0.0 && c.beta == 0.0) {
        throw std::invalid_argument("constraint needs a nonzero alpha or beta");
    }
    const ScoreVectors sv = score_vectors(g);
    ZdCandidate out;
    for (int i = 0; i < 4; ++i) {
        out.p.p[i] = c.alpha * sv.s_x[i] + c.beta * sv.s_y[i] + c.gamma;
    }
    out.p.p[0] += 1.0;
    out.p.p[1] += 1.0;
    out.feasibility = check_feasibility(out.p);
    return out;
}

SetScoreResult set_opponent_score(double p1, double p4, const GameParams& g) {
    require_valid(g);
    if (!(p1 >= 0.0 && p1 <= 1.0 && p4 >= 0.0 && p4 <= 1.0)) {
        throw std::invalid_argument("p1 and p4 must lie in [0, 1]");
    }
    const double denom = p4 + (1.0 - p1);
    if (denom == 0.0) {
        throw DegenerateTarget("p1 = 1 with p4 = 0 enforces no score (0/0 target)");
    }
    SetScoreResult out;
    const double rp = g.r - g.p;
    out.beta = (p1 - p4 - 1.0) / rp;
    out.gamma = (g.r * p4 - g.p * p1 + g.p) / rp;
    out.p.p[0] = p1;
    out.p.p[1] = (p1 * (g.t - g.p) - (1.0 + p4) * (g.t - g.r)) / rp;
    out.p.p[2] = ((1.0 - p1) * (g.p - g.s) + p4 * (g.r - g.s)) / rp;
    out.p.p[3] = p4;
    out.s_y = (g.r * p4 + g.p * (1.0 - p1)) / denom;
    out.feasibility = check_feasibility(out.p);
    return out;
}

StrategyVector own_score_strategy(const GameParams& g) {
    require_valid(g);
    return StrategyVector{Vec4{1.0, 1.0, 0.0, 0.0}};
}

double phi_upper_bound(double chi, const GameParams& g) {
    require_valid(g);
    if (!(chi >= 1.0)) throw std::invalid_argument("extortion factor chi must be >= 1");
    const double ps = g.p - g.s;
    const double tp = g.t - g.p;
    const double a = ps / (chi * tp + ps);
    const double b = ps / (chi * ps + tp);
    return std::min(a, b);
}

ExtortionResult extortionate(const ExtortionParams& params, const GameParams& g) {
    require_valid(g);
    if (!(params.chi >= 1.0)) {
        throw std::invalid_argument("extortion factor chi must be >= 1");
    }
    ExtortionResult out;
    const double chi = params.chi;
    const double phi = params.phi;
    const double ps = g.p - g.s;
    const double tp = g.t - g.p;
    out.p.p[0] = 1.0 - phi * (chi - 1.0) * (g.r - g.p) / ps;
    out.p.p[1] = 1.0 - phi * (1.0 + chi * tp / ps);
    out.p.p[2] = phi * (chi + tp / ps);
    out.p.p[3] = 0.0;
    out.phi_positive = phi > 0.0;
    out.feasibility = check_feasibility(out.p);
    return out;
}

ScorePair extortion_best_case(double chi, const GameParams& g) {
    require_valid(g);
    if (!(chi >= 1.0)) throw std::invalid_argument("extortion factor chi must be >= 1");
    const double tr = g.t - g.r;
    ScorePair out;
    out.s_x = (g.p * tr + chi * (g.r * (g.t - g.s) - g.p * tr)) / (tr + chi * (g.r - g.s));
    out.s_y = (out.s_x - g.p) / chi + g.p;
    return out;
}

}  // namespace ipd

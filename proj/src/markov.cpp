#include "ipd/markov.hpp"

#include <algorithm>
#include <cmath>

namespace ipd {

namespace {

// Reachability closure of the edge relation M(i,j) > tol.
std::array<std::array<bool, 4>, 4> reachability(const TransitionMatrix& m, double tol) {
    std::array<std::array<bool, 4>, 4> reach{};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) reach[i][j] = (i == j) || m(i, j) > tol;
    }
    for (int k = 0; k < 4; ++k) {
        for (int i = 0; i < 4; ++i) {
            if (!reach[i][k]) continue;
            for (int j = 0; j < 4; ++j) {
                if (reach[k][j]) reach[i][j] = true;
            }
        }
    }
    return reach;
}

double det3(double a, double b, double c, double d, double e, double f, double g, double h,
            double i) {
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

// Determinant of a 4x4 by cofactor expansion along the fourth column.
double det4(const std::array<Vec4, 4>& a) {
    double det = 0.0;
    for (int r = 0; r < 4; ++r) {
        int rows[3];
        int n = 0;
        for (int i = 0; i < 4; ++i) {
            if (i != r) rows[n++] = i;
        }
        const double minor =
            det3(a[rows[0]][0], a[rows[0]][1], a[rows[0]][2], a[rows[1]][0], a[rows[1]][1],
                 a[rows[1]][2], a[rows[2]][0], a[rows[2]][1], a[rows[2]][2]);
        const double sign = ((r + 3) % 2 == 0) ? 1.0 : -1.0;  // (-1)^(r+1 + 4)
        det += sign * a[r][3] * minor;
    }
    return det;
}

// Solves the 4x4 system Ax = b by Gaussian elimination with partial pivoting.
// Returns false when a pivot is numerically zero.
bool solve4(std::array<Vec4, 4> a, Vec4 b, Vec4& x) {
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (std::abs(a[pivot][col]) < 1e-14) return false;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = col + 1; r < 4; ++r) {
            const double factor = a[r][col] / a[col][col];
            if (factor == 0.0) continue;
            for (int c = col; c < 4; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    for (int r = 3; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < 4; ++c) acc -= a[r][c] * x[c];
        x[r] = acc / a[r][r];
    }
    return true;
}

Vec4 power_iteration(const TransitionMatrix& m, const PowerIterationOptions& opts,
                     long& iterations) {
    Vec4 v{0.25, 0.25, 0.25, 0.25};
    for (long it = 1; it <= opts.max_iterations; ++it) {
        Vec4 next{0.0, 0.0, 0.0, 0.0};
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) next[j] += v[i] * m(i, j);
        }
        if (opts.damping > 0.0) {
            for (int j = 0; j < 4; ++j) {
                next[j] = (1.0 - opts.damping) * next[j] + opts.damping * v[j];
            }
        }
        double sum = next[0] + next[1] + next[2] + next[3];
        for (double& x : next) x /= sum;
        double diff = 0.0;
        for (int j = 0; j < 4; ++j) diff = std::max(diff, std::abs(next[j] - v[j]));
        v = next;
        if (diff < opts.tol) {
            iterations = it;
            return v;
        }
    }
    throw NonConvergence("power iteration did not converge within the iteration cap");
}

// Rows of the score-identity determinant for the pair (p, q): the f column is
// supplied by the caller.  Row i conditions on previous outcome i in X's
// view, so Y's probability is looked up through the view swap.
std::array<Vec4, 4> identity_rows(const StrategyVector& p, const StrategyVector& q,
                                  const Vec4& f) {
    std::array<Vec4, 4> a{};
    for (int i = 0; i < 4; ++i) {
        const auto o = static_cast<Outcome>(i);
        const double pi = p[o];
        const double qi = q[swap_view(o)];
        const bool x_cooperated = own_action(o) == Action::C;
        const bool y_cooperated = other_action(o) == Action::C;
        a[i][0] = pi * qi - (x_cooperated && y_cooperated ? 1.0 : 0.0);
        a[i][1] = pi - (x_cooperated ? 1.0 : 0.0);
        a[i][2] = qi - (y_cooperated ? 1.0 : 0.0);
        a[i][3] = f[i];
    }
    return a;
}

}  // namespace

bool is_probability_vector(const StrategyVector& v, double tol) {
    return std::all_of(v.p.begin(), v.p.end(), [tol](double x) {
        return std::isfinite(x) && x >= -tol && x <= 1.0 + tol;
    });
}

void require_probability_vector(const StrategyVector& v, double tol) {
    if (!is_probability_vector(v, tol)) {
        throw std::invalid_argument("strategy components must lie in [0, 1]");
    }
}

TransitionMatrix build_transition_matrix(const StrategyVector& p, const StrategyVector& q) {
    TransitionMatrix m;
    for (int i = 0; i < 4; ++i) {
        const auto o = static_cast<Outcome>(i);
        const double px = p[o];
        const double qy = q[swap_view(o)];
        m.m[i][static_cast<int>(Outcome::CC)] = px * qy;
        m.m[i][static_cast<int>(Outcome::CD)] = px * (1.0 - qy);
        m.m[i][static_cast<int>(Outcome::DC)] = (1.0 - px) * qy;
        m.m[i][static_cast<int>(Outcome::DD)] = (1.0 - px) * (1.0 - qy);
    }
    return m;
}

bool is_irreducible(const TransitionMatrix& m, double edge_tol) {
    const auto reach = reachability(m, edge_tol);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (!reach[i][j]) return false;
        }
    }
    return true;
}

int closed_class_count(const TransitionMatrix& m, double edge_tol) {
    const auto reach = reachability(m, edge_tol);
    int count = 0;
    std::array<bool, 4> seen{};
    for (int i = 0; i < 4; ++i) {
        if (seen[i]) continue;
        // Communicating class of i.
        std::array<bool, 4> in_class{};
        for (int j = 0; j < 4; ++j) in_class[j] = reach[i][j] && reach[j][i];
        bool closed = true;
        for (int j = 0; j < 4; ++j) {
            if (!in_class[j]) continue;
            seen[j] = true;
            for (int k = 0; k < 4; ++k) {
                if (!in_class[k] && m(j, k) > edge_tol) closed = false;
            }
        }
        if (closed) ++count;
    }
    return count;
}

StationaryResult stationary_distribution(const TransitionMatrix& m,
                                         const PowerIterationOptions& opts) {
    StationaryResult result;
    if (is_irreducible(m)) {
        // v M = v with sum(v) = 1: transpose, subtract identity, replace the
        // last equation by the normalization row.  Any single row of M^T - I
        // is redundant (the four sum to zero), so the system is nonsingular.
        std::array<Vec4, 4> a{};
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) a[i][j] = m(j, i) - (i == j ? 1.0 : 0.0);
        }
        a[3] = Vec4{1.0, 1.0, 1.0, 1.0};
        Vec4 b{0.0, 0.0, 0.0, 1.0};
        Vec4 v{};
        if (solve4(a, b, v)) {
            for (double& x : v) x = std::max(x, 0.0);
            const double sum = v[0] + v[1] + v[2] + v[3];
            for (double& x : v) x /= sum;
            result.v = v;
            result.unique = true;
            result.route = StationaryResult::Route::LinearSolve;
            return result;
        }
        // Numerically singular despite irreducibility: fall through.
    }
    result.route = StationaryResult::Route::PowerIteration;
    result.unique = false;
    result.v = power_iteration(m, opts, result.iterations);
    return result;
}

ScoreVectors score_vectors(const GameParams& g) {
    return ScoreVectors{Vec4{g.r, g.s, g.t, g.p}, Vec4{g.r, g.t, g.s, g.p}};
}

double determinant_form(const StrategyVector& p, const StrategyVector& q, const Vec4& f) {
    return det4(identity_rows(p, q, f));
}

ScoreResult expected_scores(const StrategyVector& p, const StrategyVector& q,
                            const GameParams& g, ScoreRoute route) {
    const ScoreVectors sv = score_vectors(g);
    ScoreResult result;
    const double d1 = determinant_form(p, q, Vec4{1.0, 1.0, 1.0, 1.0});
    const bool use_determinant =
        route == ScoreRoute::Determinant || (route == ScoreRoute::Auto && std::abs(d1) > 1e-9);
    if (use_determinant) {
        result.route = ScoreRoute::Determinant;
        result.s_x = determinant_form(p, q, sv.s_x) / d1;
        result.s_y = determinant_form(p, q, sv.s_y) / d1;
        return result;
    }
    result.route = ScoreRoute::Stationary;
    const TransitionMatrix m = build_transition_matrix(p, q);
    const StationaryResult st = stationary_distribution(m);
    result.degenerate = closed_class_count(m) > 1;
    result.s_x = 0.0;
    result.s_y = 0.0;
    for (int i = 0; i < 4; ++i) {
        result.s_x += st.v[i] * sv.s_x[i];
        result.s_y += st.v[i] * sv.s_y[i];
    }
    return result;
}

}  // namespace ipd

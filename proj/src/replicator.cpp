#include "ipd/replicator.hpp"

#include <algorithm>
#include <cmath>

namespace ipd {

namespace {

constexpr double kNeutralTol = 1e-9;

Vec3 matvec(const ReplicatorMatrix& m, const Vec3& x) {
    Vec3 ax{};
    for (int i = 0; i < 3; ++i) {
        ax[i] = m.a[i][0] * x[0] + m.a[i][1] * x[1] + m.a[i][2] * x[2];
    }
    return ax;
}

// d(xdot_r)/d(x_k) in the full, unconstrained coordinates.
double full_partial(const Vec3& x, const ReplicatorMatrix& m, const Vec3& ax, double phi, int r,
                    int k) {
    // phi = x.Ax, dphi/dx_k = (Ax)_k + (A^T x)_k
    double atx_k = m.a[0][k] * x[0] + m.a[1][k] * x[1] + m.a[2][k] * x[2];
    double d = x[r] * (m.a[r][k] - (ax[k] + atx_k));
    if (r == k) d += ax[r] - phi;
    return d;
}

// Jacobian restricted to the simplex in coordinates (x2, x3), x1 eliminated.
std::array<std::array<double, 2>, 2> reduced_jacobian(const Vec3& x, const ReplicatorMatrix& m) {
    const Vec3 ax = matvec(m, x);
    const double phi = x[0] * ax[0] + x[1] * ax[1] + x[2] * ax[2];
    std::array<std::array<double, 2>, 2> j{};
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            j[r][c] = full_partial(x, m, ax, phi, r + 1, c + 1) -
                      full_partial(x, m, ax, phi, r + 1, 0);
        }
    }
    return j;
}

FixedPointReport::Stability classify_spectrum(const std::array<std::array<double, 2>, 2>& j,
                                              std::array<double, 2>& re,
                                              std::array<double, 2>& im) {
    const double tr = j[0][0] + j[1][1];
    const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    const double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        re = {(tr - root) / 2.0, (tr + root) / 2.0};
        im = {0.0, 0.0};
    } else {
        re = {tr / 2.0, tr / 2.0};
        const double w = std::sqrt(-disc) / 2.0;
        im = {-w, w};
    }
    if (std::abs(re[0]) < kNeutralTol || std::abs(re[1]) < kNeutralTol) {
        return FixedPointReport::Stability::Neutral;
    }
    if (re[0] < 0.0 && re[1] < 0.0) return FixedPointReport::Stability::Attracting;
    if (re[0] > 0.0 && re[1] > 0.0) return FixedPointReport::Stability::Repelling;
    return FixedPointReport::Stability::Saddle;
}

FixedPointReport make_report(FixedPointReport::Kind kind, const Vec3& x,
                             const ReplicatorMatrix& m) {
    FixedPointReport rep;
    rep.kind = kind;
    rep.location = x;
    rep.stability = classify_spectrum(reduced_jacobian(x, m), rep.eig_re, rep.eig_im);
    return rep;
}

void rk4_step(Vec3& x, const ReplicatorMatrix& m, double h, double& max_drift) {
    const Vec3 k1 = replicator_rhs(x, m);
    Vec3 tmp;
    for (int i = 0; i < 3; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    const Vec3 k2 = replicator_rhs(tmp, m);
    for (int i = 0; i < 3; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    const Vec3 k3 = replicator_rhs(tmp, m);
    for (int i = 0; i < 3; ++i) tmp[i] = x[i] + h * k3[i];
    const Vec3 k4 = replicator_rhs(tmp, m);
    for (int i = 0; i < 3; ++i) {
        x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    double sum = 0.0;
    for (double v : x) {
        if (v < -1e-6 || v > 1.0 + 1e-6) {
            throw StepTooLarge("state left the simplex; reduce the step size");
        }
        sum += v;
    }
    max_drift = std::max(max_drift, std::abs(sum - 1.0));
    double clipped = 0.0;
    for (double& v : x) {
        v = std::max(v, 0.0);
        clipped += v;
    }
    for (double& v : x) v /= clipped;
}

void require_simplex(const Vec3& x) {
    const double sum = x[0] + x[1] + x[2];
    if (std::abs(sum - 1.0) > 1e-9 || x[0] < 0.0 || x[1] < 0.0 || x[2] < 0.0) {
        throw std::invalid_argument("initial state must lie on the simplex");
    }
}

}  // namespace

ReplicatorMatrix build_full_matrix(const GameParams& g, double omega) {
    require_valid(g);
    if (!(omega > 0.0 && omega < 1.0)) {
        throw std::invalid_argument("continuation probability omega must lie in (0, 1)");
    }
    ReplicatorMatrix m;
    m.omega = omega;
    m.a[0] = Vec3{g.r, g.s, g.r};
    m.a[1] = Vec3{g.t, g.p, (1.0 - omega) * g.t + omega * g.p};
    m.a[2] = Vec3{g.r, (1.0 - omega) * g.s + omega * g.p, g.r};
    return m;
}

ReplicatorMatrix reduce_matrix(const ReplicatorMatrix& m) {
    ReplicatorMatrix out = m;
    for (int j = 0; j < 3; ++j) {
        const double top = m.a[0][j];
        for (int i = 0; i < 3; ++i) out.a[i][j] = m.a[i][j] - top;
    }
    return out;
}

Vec3 replicator_rhs(const Vec3& x, const ReplicatorMatrix& m) {
    const Vec3 ax = matvec(m, x);
    const double phi = x[0] * ax[0] + x[1] * ax[1] + x[2] * ax[2];
    return Vec3{x[0] * (ax[0] - phi), x[1] * (ax[1] - phi), x[2] * (ax[2] - phi)};
}

Trajectory integrate(const Vec3& x0, const ReplicatorMatrix& m, const IntegrateOptions& opts) {
    require_simplex(x0);
    if (!(opts.step > 0.0) || !(opts.horizon >= 0.0) || opts.record_every < 1) {
        throw std::invalid_argument("bad integration options");
    }
    const long steps = std::lround(opts.horizon / opts.step);
    Trajectory traj;
    traj.t.reserve(static_cast<std::size_t>(steps / opts.record_every) + 2);
    traj.x.reserve(traj.t.capacity());
    Vec3 x = x0;
    traj.t.push_back(0.0);
    traj.x.push_back(x);
    for (long i = 1; i <= steps; ++i) {
        rk4_step(x, m, opts.step, traj.max_drift);
        if (i % opts.record_every == 0 || i == steps) {
            traj.t.push_back(static_cast<double>(i) * opts.step);
            traj.x.push_back(x);
        }
    }
    return traj;
}

Vec3 final_state(const Vec3& x0, const ReplicatorMatrix& m, const IntegrateOptions& opts) {
    require_simplex(x0);
    const long steps = std::lround(opts.horizon / opts.step);
    Vec3 x = x0;
    double drift = 0.0;
    for (long i = 0; i < steps; ++i) rk4_step(x, m, opts.step, drift);
    return x;
}

std::vector<IndifferenceLine> indifference_lines(const ReplicatorMatrix& m) {
    std::vector<IndifferenceLine> lines;
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            // (Ax)_i - (Ax)_j with x1 = 1 - x2 - x3 substituted.
            const Vec3 d{m.a[i][0] - m.a[j][0], m.a[i][1] - m.a[j][1], m.a[i][2] - m.a[j][2]};
            IndifferenceLine line;
            line.i = i;
            line.j = j;
            line.c0 = d[0];
            line.c2 = d[1] - d[0];
            line.c3 = d[2] - d[0];
            line.degenerate = std::abs(line.c0) < kNeutralTol &&
                              std::abs(line.c2) < kNeutralTol && std::abs(line.c3) < kNeutralTol;
            lines.push_back(line);
        }
    }
    return lines;
}

std::vector<FixedPointReport> classify_fixed_points(const ReplicatorMatrix& m) {
    std::vector<FixedPointReport> reports;
    for (int v = 0; v < 3; ++v) {
        Vec3 x{0.0, 0.0, 0.0};
        x[v] = 1.0;
        FixedPointReport rep = make_report(FixedPointReport::Kind::Vertex, x, m);
        rep.vertex = v;
        reports.push_back(rep);
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            // Payoff difference along the edge (1-s)*e_i + s*e_j is affine in
            // s; g0/g1 are its endpoint values.
            const double g0 = m.a[j][i] - m.a[i][i];
            const double g1 = m.a[j][j] - m.a[i][j];
            if (std::abs(g0) < kNeutralTol && std::abs(g1) < kNeutralTol) {
                Vec3 x{0.0, 0.0, 0.0};
                x[i] = 0.5;
                x[j] = 0.5;
                FixedPointReport rep = make_report(FixedPointReport::Kind::EdgeLine, x, m);
                rep.stability = FixedPointReport::Stability::Neutral;
                rep.edge_i = i;
                rep.edge_j = j;
                reports.push_back(rep);
            } else if (g0 * g1 < 0.0) {
                const double s = g0 / (g0 - g1);
                Vec3 x{0.0, 0.0, 0.0};
                x[i] = 1.0 - s;
                x[j] = s;
                FixedPointReport rep = make_report(FixedPointReport::Kind::Edge, x, m);
                rep.edge_i = i;
                rep.edge_j = j;
                reports.push_back(rep);
            }
        }
    }
    // Interior point: (Ax)_1 = (Ax)_2 = (Ax)_3 as a 2x2 affine system in
    // (x2, x3).
    double a11 = 0.0, a12 = 0.0, b1 = 0.0, a21 = 0.0, a22 = 0.0, b2 = 0.0;
    {
        const Vec3 d1{m.a[0][0] - m.a[1][0], m.a[0][1] - m.a[1][1], m.a[0][2] - m.a[1][2]};
        const Vec3 d2{m.a[0][0] - m.a[2][0], m.a[0][1] - m.a[2][1], m.a[0][2] - m.a[2][2]};
        a11 = d1[1] - d1[0];
        a12 = d1[2] - d1[0];
        b1 = -d1[0];
        a21 = d2[1] - d2[0];
        a22 = d2[2] - d2[0];
        b2 = -d2[0];
    }
    const double det = a11 * a22 - a12 * a21;
    if (std::abs(det) > kNeutralTol) {
        const double u = (b1 * a22 - b2 * a12) / det;
        const double v = (a11 * b2 - a21 * b1) / det;
        const double w = 1.0 - u - v;
        const double inner = 1e-9;
        if (u > inner && v > inner && w > inner) {
            reports.push_back(
                make_report(FixedPointReport::Kind::Interior, Vec3{w, u, v}, m));
        }
    }
    return reports;
}

}  // namespace ipd

#include <cmath>
#include <random>

#include "doctest.h"
#include "ipd/markov.hpp"
#include "oracles.hpp"

using namespace ipd;

namespace {

const GameParams kStd{5, 3, 1, 0};

StrategyVector sv(double a, double b, double c, double d) {
    return StrategyVector{Vec4{a, b, c, d}};
}

}  // namespace

TEST_SUITE("markov") {

TEST_CASE("probability vector bounds use the documented tolerance") {
    CHECK(is_probability_vector(sv(0, 1, 0.5, 1)));
    CHECK(is_probability_vector(sv(-1e-13, 1.0 + 1e-13, 0, 1)));
    CHECK(!is_probability_vector(sv(-1e-9, 0, 0, 0)));
    CHECK(!is_probability_vector(sv(0, 1.001, 0, 0)));
    CHECK_THROWS_AS(require_probability_vector(sv(2, 0, 0, 0)), std::invalid_argument);
}

TEST_CASE("mutual cooperators absorb into CC") {
    const TransitionMatrix m = build_transition_matrix(sv(1, 1, 1, 1), sv(1, 1, 1, 1));
    for (int i = 0; i < 4; ++i) {
        CHECK(m(i, 0) == 1.0);
        for (int j = 1; j < 4; ++j) CHECK(m(i, j) == 0.0);
    }
}

TEST_CASE("reciprocator pair cycles the mixed states") {
    const TransitionMatrix m = build_transition_matrix(sv(1, 0, 1, 0), sv(1, 0, 1, 0));
    const double want[4][4] = {
        {1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) CHECK(m(i, j) == want[i][j]);
    }
}

TEST_CASE("uniform strategies give the flat matrix") {
    const TransitionMatrix m =
        build_transition_matrix(sv(0.5, 0.5, 0.5, 0.5), sv(0.5, 0.5, 0.5, 0.5));
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) CHECK(m(i, j) == doctest::Approx(0.25).epsilon(1e-15));
    }
}

TEST_CASE("rows are stochastic for random strategies") {
    std::mt19937_64 gen(101);
    for (int trial = 0; trial < 200; ++trial) {
        const StrategyVector p{oracle::random_unit_box(gen)};
        const StrategyVector q{oracle::random_unit_box(gen)};
        const TransitionMatrix m = build_transition_matrix(p, q);
        for (int i = 0; i < 4; ++i) {
            double sum = 0.0;
            for (int j = 0; j < 4; ++j) {
                CHECK(m(i, j) >= 0.0);
                CHECK(m(i, j) <= 1.0);
                sum += m(i, j);
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("the opponent's vector is read in the opponent's view") {
    // An asymmetric pair makes any CD/DC mix-up visible: compare the chain's
    // stationary distribution against a from-scratch simulation that applies
    // the strategies directly.
    const StrategyVector p = sv(0.9, 0.2, 0.7, 0.4);
    const StrategyVector q = sv(0.3, 0.8, 0.1, 0.6);
    const auto stat = stationary_distribution(build_transition_matrix(p, q));
    REQUIRE(stat.unique);
    const auto sim = oracle::simulate_memory_one(p.p, q.p, 600000, 424242, kStd);
    for (int i = 0; i < 4; ++i) {
        CHECK(std::fabs(stat.v[i] - sim.freq[i]) < 0.01);
    }
}

TEST_CASE("irreducibility classification") {
    CHECK(is_irreducible(build_transition_matrix(sv(0.5, 0.5, 0.5, 0.5), sv(0.5, 0.5, 0.5, 0.5))));
    CHECK(!is_irreducible(build_transition_matrix(sv(1, 1, 1, 1), sv(1, 1, 1, 1))));
    CHECK(!is_irreducible(build_transition_matrix(sv(1, 0, 1, 0), sv(1, 0, 1, 0))));
    std::mt19937_64 gen(55);
    for (int trial = 0; trial < 50; ++trial) {
        const StrategyVector p{oracle::random_interior(gen)};
        const StrategyVector q{oracle::random_interior(gen)};
        CHECK(is_irreducible(build_transition_matrix(p, q)));
    }
}

TEST_CASE("closed communicating classes") {
    // Reciprocator pair: {CC}, {DD} and the 2-cycle {CD,DC} are all closed.
    CHECK(closed_class_count(build_transition_matrix(sv(1, 0, 1, 0), sv(1, 0, 1, 0))) == 3);
    // Mutual cooperators: only {CC} is closed, the rest drains into it.
    CHECK(closed_class_count(build_transition_matrix(sv(1, 1, 1, 1), sv(1, 1, 1, 1))) == 1);
    CHECK(closed_class_count(build_transition_matrix(sv(0.5, 0.5, 0.5, 0.5),
                                                     sv(0.5, 0.5, 0.5, 0.5))) == 1);
}

TEST_CASE("stationary distribution of the flat chain is uniform") {
    const auto r = stationary_distribution(
        build_transition_matrix(sv(0.5, 0.5, 0.5, 0.5), sv(0.5, 0.5, 0.5, 0.5)));
    CHECK(r.unique);
    CHECK(r.route == StationaryResult::Route::LinearSolve);
    for (int i = 0; i < 4; ++i) CHECK(r.v[i] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("stationary distribution matches the power-iteration oracle") {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const StrategyVector p{oracle::random_interior(gen)};
        const StrategyVector q{oracle::random_interior(gen)};
        const TransitionMatrix m = build_transition_matrix(p, q);
        const auto r = stationary_distribution(m);
        REQUIRE(r.unique);
        CHECK(r.route == StationaryResult::Route::LinearSolve);
        const Vec4 ref = oracle::stationary_power(m);
        for (int i = 0; i < 4; ++i) CHECK(std::fabs(r.v[i] - ref[i]) < 1e-8);
    }
}

TEST_CASE("stationary vector of the pinned extortion example") {
    // X extorts with (11/13, 1/2, 7/26, 0) against an unconditional
    // cooperator; only CC and DC recur and the split is 7/11 : 4/11.
    const auto r = stationary_distribution(
        build_transition_matrix(sv(11.0 / 13, 0.5, 7.0 / 26, 0), sv(1, 1, 1, 1)));
    CHECK(r.v[0] == doctest::Approx(7.0 / 11).epsilon(1e-10));
    CHECK(r.v[1] == doctest::Approx(0.0).scale(1).epsilon(1e-10));
    CHECK(r.v[2] == doctest::Approx(4.0 / 11).epsilon(1e-10));
    CHECK(r.v[3] == doctest::Approx(0.0).scale(1).epsilon(1e-10));
}

TEST_CASE("reducible aperiodic chain falls back to power iteration") {
    const auto r = stationary_distribution(build_transition_matrix(sv(1, 1, 1, 1), sv(1, 1, 1, 1)));
    CHECK(!r.unique);
    CHECK(r.route == StationaryResult::Route::PowerIteration);
    CHECK(r.v[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("periodic reducible chain raises NonConvergence without damping") {
    // CC -> CD, CD -> DC, DC -> CD, DD -> CD: the uniform start oscillates
    // between (0, 3/4, 1/4, 0) and (0, 1/4, 3/4, 0) forever.
    const TransitionMatrix m = build_transition_matrix(sv(1, 0, 1, 1), sv(0, 0, 1, 0));
    PowerIterationOptions opts;
    opts.max_iterations = 10000;
    CHECK_THROWS_AS(stationary_distribution(m, opts), NonConvergence);

    PowerIterationOptions damped;
    damped.damping = 0.2;
    const auto r = stationary_distribution(m, damped);
    CHECK(r.v[1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.v[2] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("damping leaves genuine stationary vectors untouched") {
    // Mutual extortioners share p4 = 0, so DD is absorbing; the damped and
    // undamped limits agree exactly on e4.
    const TransitionMatrix m = build_transition_matrix(sv(8.0 / 9, 0.5, 1.0 / 3, 0),
                                                       sv(11.0 / 13, 0.5, 7.0 / 26, 0));
    PowerIterationOptions opts;
    opts.damping = 0.5;
    const auto r = stationary_distribution(m, opts);
    CHECK(r.v[3] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("determinant form is zero on the zero vector") {
    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 20; ++trial) {
        const StrategyVector p{oracle::random_unit_box(gen)};
        const StrategyVector q{oracle::random_unit_box(gen)};
        CHECK(determinant_form(p, q, Vec4{0, 0, 0, 0}) == 0.0);
    }
}

TEST_CASE("determinant form is linear in its third argument") {
    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 100; ++trial) {
        const StrategyVector p{oracle::random_unit_box(gen)};
        const StrategyVector q{oracle::random_unit_box(gen)};
        Vec4 f = oracle::random_interior(gen, -2.0, 2.0);
        Vec4 g = oracle::random_interior(gen, -2.0, 2.0);
        const double a = -1.5 + 3.0 * ((gen() >> 11) * 0x1.0p-53);
        const double b = -1.5 + 3.0 * ((gen() >> 11) * 0x1.0p-53);
        Vec4 mix;
        for (int i = 0; i < 4; ++i) mix[i] = a * f[i] + b * g[i];
        const double lhs = determinant_form(p, q, mix);
        const double rhs = a * determinant_form(p, q, f) + b * determinant_form(p, q, g);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("determinant ratio equals the stationary average") {
    std::mt19937_64 gen(10);
    for (int trial = 0; trial < 50; ++trial) {
        const StrategyVector p{oracle::random_interior(gen)};
        const StrategyVector q{oracle::random_interior(gen)};
        const Vec4 f = oracle::random_interior(gen, -3.0, 3.0);
        const Vec4 v = oracle::stationary_power(build_transition_matrix(p, q));
        const double d1 = determinant_form(p, q, Vec4{1, 1, 1, 1});
        REQUIRE(std::fabs(d1) > 1e-12);
        const double ratio = determinant_form(p, q, f) / d1;
        CHECK(std::fabs(ratio - oracle::dot(v, f)) < 1e-8);
    }
}

TEST_CASE("reciprocator pair yields a singular normalization determinant") {
    const StrategyVector tft = sv(1, 0, 1, 0);
    CHECK(std::fabs(determinant_form(tft, tft, Vec4{1, 1, 1, 1})) < 1e-12);
}

TEST_CASE("score vectors follow the outcome order") {
    const ScoreVectors s = score_vectors(kStd);
    CHECK(s.s_x == Vec4{3, 0, 5, 1});
    CHECK(s.s_y == Vec4{3, 5, 0, 1});
}

TEST_CASE("expected scores of the pinned extortion examples") {
    // Against an unconditional cooperator the chi = 3 extortioner averages
    // 3 * 7/11 + 5 * 4/11 = 41/11 while the cooperator gets 3 * 7/11 = 21/11.
    const auto a = expected_scores(sv(11.0 / 13, 0.5, 7.0 / 26, 0), sv(1, 1, 1, 1), kStd);
    CHECK(a.s_x == doctest::Approx(41.0 / 11).epsilon(1e-10));
    CHECK(a.s_y == doctest::Approx(21.0 / 11).epsilon(1e-10));
    CHECK(!a.degenerate);

    const auto b = expected_scores(sv(8.0 / 9, 0.5, 1.0 / 3, 0), sv(1, 1, 1, 1), kStd);
    CHECK(b.s_x == doctest::Approx(3.5).epsilon(1e-10));
    CHECK(b.s_y == doctest::Approx(2.25).epsilon(1e-10));
}

TEST_CASE("absorbing cooperation scores the reward on either route") {
    // The all-cooperate pair is reducible but has a single closed class, so
    // the normalization determinant is still nonzero (-1) and the automatic
    // route stays on the determinant ratio; the stationary fallback agrees.
    const auto r = expected_scores(sv(1, 1, 1, 1), sv(1, 1, 1, 1), kStd);
    CHECK(r.s_x == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(r.s_y == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(!r.degenerate);
    const auto f = expected_scores(sv(1, 1, 1, 1), sv(1, 1, 1, 1), kStd, ScoreRoute::Stationary);
    CHECK(f.s_x == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.s_y == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("mutual extortion collapses to the punishment point") {
    const StrategyVector chi2 = sv(8.0 / 9, 0.5, 1.0 / 3, 0);
    const StrategyVector chi3 = sv(11.0 / 13, 0.5, 7.0 / 26, 0);
    const auto a = expected_scores(chi2, chi3, kStd);
    CHECK(a.s_x == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(a.s_y == doctest::Approx(1.0).epsilon(1e-9));
    const auto b = expected_scores(chi2, chi3, kStd, ScoreRoute::Stationary);
    CHECK(b.s_x == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(b.s_y == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("both score routes agree on irreducible chains") {
    std::mt19937_64 gen(77);
    for (int trial = 0; trial < 50; ++trial) {
        const StrategyVector p{oracle::random_interior(gen)};
        const StrategyVector q{oracle::random_interior(gen)};
        const auto det = expected_scores(p, q, kStd, ScoreRoute::Determinant);
        const auto stat = expected_scores(p, q, kStd, ScoreRoute::Stationary);
        CHECK(det.s_x == doctest::Approx(stat.s_x).epsilon(1e-9));
        CHECK(det.s_y == doctest::Approx(stat.s_y).epsilon(1e-9));
    }
}

TEST_CASE("start-dependent chains are flagged degenerate") {
    const auto r = expected_scores(sv(1, 0, 1, 0), sv(1, 0, 1, 0), kStd);
    CHECK(r.degenerate);
    CHECK(r.route == ScoreRoute::Stationary);
    // The uniform start splits across the three closed classes evenly.
    CHECK(r.s_x == doctest::Approx(2.25).epsilon(1e-9));
    CHECK(r.s_y == doctest::Approx(2.25).epsilon(1e-9));
}

TEST_CASE("scores stay inside the payoff hull") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 100; ++trial) {
        const StrategyVector p{oracle::random_unit_box(gen)};
        const StrategyVector q{oracle::random_unit_box(gen)};
        const auto r = expected_scores(p, q, kStd);
        CHECK(r.s_x >= kStd.s - 1e-9);
        CHECK(r.s_x <= kStd.t + 1e-9);
        CHECK(r.s_y >= kStd.s - 1e-9);
        CHECK(r.s_y <= kStd.t + 1e-9);
    }
}

}  // TEST_SUITE

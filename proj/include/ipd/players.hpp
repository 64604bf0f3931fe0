#pragma once

#include <array>
#include <optional>
#include <string>

#include "ipd/game.hpp"
#include "ipd/markov.hpp"
#include "ipd/rng.hpp"

namespace ipd {

// How a memory-one player opens the match, before any outcome exists.
struct FirstMovePolicy {
    enum class Kind { Cooperate, Defect, Bernoulli };
    Kind kind = Kind::Bernoulli;
    double rate = 0.5;  // cooperation probability for Bernoulli

    static FirstMovePolicy cooperate() { return {Kind::Cooperate, 1.0}; }
    static FirstMovePolicy defect() { return {Kind::Defect, 0.0}; }
    static FirstMovePolicy bernoulli(double rate) { return {Kind::Bernoulli, rate}; }
};

struct PlayerSpec {
    enum class Kind { Cooperator, Defector, TitForTat, Grudger, Random, MemoryOne, Adaptive };

    Kind kind = Kind::Cooperator;
    StrategyVector p;                            // MemoryOne
    std::optional<FirstMovePolicy> first_move;   // MemoryOne; empty -> match default
    double coop_rate = 0.5;                      // Random
    double epsilon = 0.1;                        // Adaptive: exploration probability
    int k = 20;                                  // Adaptive: warm-up rounds of random play
    std::string label;                           // display name; empty -> default_label()

    static PlayerSpec cooperator();
    static PlayerSpec defector();
    static PlayerSpec tit_for_tat();
    static PlayerSpec grudger();
    static PlayerSpec random(double coop_rate);
    static PlayerSpec memory_one(const StrategyVector& p,
                                 std::optional<FirstMovePolicy> first_move = std::nullopt,
                                 std::string label = {});
    static PlayerSpec adaptive(double epsilon, int k);
};

// Validates the numeric fields (probabilities in range, k >= 0); throws
// std::invalid_argument on a bad spec.
void require_valid(const PlayerSpec& spec);

std::string default_label(const PlayerSpec& spec);
std::string display_label(const PlayerSpec& spec);  // label or default_label

// Per-state opponent-cooperation counts for the adaptive player: n visits of
// each previous-outcome state, d of which the opponent answered with C.
struct AdaptiveState {
    std::array<long, 4> n{0, 0, 0, 0};
    std::array<long, 4> d{0, 0, 0, 0};
};

// Estimated opponent cooperation probability per state: d/n, or 0.5 for a
// state never seen.
Vec4 estimate_policy(const AdaptiveState& state);

// n[prev] += 1, and d[prev] += 1 when the opponent cooperated.
void adaptive_update(AdaptiveState& state, Outcome prev, Action opponent_action);

struct PlayerState {
    long round = 0;                 // completed rounds
    std::optional<Outcome> last;    // previous round's outcome, own view
    bool grudged = false;           // Grudger: opponent has defected at least once
    AdaptiveState adaptive;
};

// The player's move for the coming round.  Randomized players consume their
// stream in a fixed documented order (adaptive: exploration coin first, then
// action coin) so replays are bit-reproducible.  default_first_move applies
// to MemoryOne specs that leave first_move unset.
Action next_action(const PlayerSpec& spec, const PlayerState& state, Rng& rng,
                   const FirstMovePolicy& default_first_move = FirstMovePolicy{});

// Folds the finished round (own view) into the state: round count, last
// outcome, grudge flag, and the adaptive counts (which track the opponent's
// response to the *previous* outcome, so the first round only records).
void record_outcome(const PlayerSpec& spec, PlayerState& state, Outcome outcome);

}  // namespace ipd

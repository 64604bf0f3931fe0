#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace ipd {

// One player's move in a single round.
enum class Action : int { C = 0, D = 1 };

// Joint outcome of a round from one player's point of view: first letter is
// that player's own action, second the opponent's.  The index order CC, CD,
// DC, DD is fixed and shared by strategy vectors, transition matrices and
// stationary distributions throughout the library.
enum class Outcome : int { CC = 0, CD = 1, DC = 2, DD = 3 };

inline constexpr int kNumOutcomes = 4;

constexpr Outcome outcome_of(Action own, Action other) {
    return static_cast<Outcome>((static_cast<int>(own) << 1) | static_cast<int>(other));
}

constexpr Action own_action(Outcome o) {
    return static_cast<Action>((static_cast<int>(o) >> 1) & 1);
}

constexpr Action other_action(Outcome o) {
    return static_cast<Action>(static_cast<int>(o) & 1);
}

// The same round seen from the opponent's side: CD and DC trade places.
constexpr Outcome swap_view(Outcome o) {
    return outcome_of(other_action(o), own_action(o));
}

// Stage-game payoffs.  t: temptation (defect vs cooperator), r: reward for
// mutual cooperation, p: punishment for mutual defection, s: sucker's payoff.
struct GameParams {
    double t = 5.0;
    double r = 3.0;
    double p = 1.0;
    double s = 0.0;
};

struct ParamError {
    enum class Kind { NonFinite, OrderingViolation };
    Kind kind;
    std::string message;
};

// Checks finiteness and the strict ordering t > r > p > s.  Returns the first
// failure found, or nullopt when the parameters are valid.
std::optional<ParamError> validate(const GameParams& g);

// Throws std::invalid_argument when validate() reports a problem.
void require_valid(const GameParams& g);

// Payoff to the "own" player of an outcome expressed in their view.
constexpr double payoff(const GameParams& g, Outcome o) {
    switch (o) {
        case Outcome::CC: return g.r;
        case Outcome::CD: return g.s;
        case Outcome::DC: return g.t;
        case Outcome::DD: return g.p;
    }
    return 0.0;  // unreachable
}

// Donation game: cooperation gives b to the other player at own cost c.
// Maps onto (t, r, p, s) = (b, b - c, 0, -c); requires b > c > 0.
struct DonationParams {
    double b = 3.0;
    double c = 1.0;
};

GameParams donation_game(const DonationParams& d);

}  // namespace ipd

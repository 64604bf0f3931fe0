#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ipd/game.hpp"
#include "ipd/markov.hpp"
#include "ipd/players.hpp"

namespace ipd {

struct MatchLength {
    enum class Kind { Fixed, Geometric };
    Kind kind = Kind::Fixed;
    long rounds = 200;   // Fixed
    double omega = 0.9;  // Geometric: continuation probability

    static MatchLength fixed(long rounds) { return {Kind::Fixed, rounds, 0.0}; }
    static MatchLength geometric(double omega) { return {Kind::Geometric, 0, omega}; }
};

// Mean number of rounds of a geometric match: 1 / (1 - omega).
double expected_length(double omega);

struct MatchConfig {
    GameParams game;
    MatchLength length = MatchLength::fixed(200);
    std::uint64_t seed = 0;
    // Applied to MemoryOne players that do not pin their own first move.
    FirstMovePolicy default_first_move = FirstMovePolicy{};
};

struct MatchResult {
    std::vector<Outcome> outcomes;  // per round, X's view
    long rounds = 0;
    double total_x = 0.0;
    double total_y = 0.0;
    double mean_x = 0.0;  // per-round means
    double mean_y = 0.0;
    long coop_x = 0;  // cooperative moves per player
    long coop_y = 0;
    Action first_x = Action::C;
    Action first_y = Action::C;
};

// One match of x against y.  The geometric length (when configured) is drawn
// once up front from a stream derived from config.seed; each player then
// consumes an independent derived stream, so the whole match is reproducible
// from (specs, config).
MatchResult play_match(const PlayerSpec& x, const PlayerSpec& y, const MatchConfig& config);

// Bit-stable identity of a player spec (FNV-1a over its canonical encoding).
// Tournament match seeds key on these identities rather than input positions,
// so reordering the player list cannot change anyone's results.
std::uint64_t player_key(const PlayerSpec& spec);

struct TournamentConfig {
    GameParams game;
    std::vector<PlayerSpec> players;
    MatchLength length = MatchLength::fixed(200);
    int repetitions = 30;
    bool include_self_play = false;
    std::uint64_t seed = 0;
    FirstMovePolicy default_first_move = FirstMovePolicy{};
};

struct PlayerSummary {
    std::string label;
    int input_index = 0;
    int rank = 0;                          // 1-based, after sorting
    double median_score = 0.0;             // median over opponents of mean per-round score
    double mean_score = 0.0;               // mean over opponents of the same
    double cooperation_rate = 0.0;         // fraction of all moves that were C
    double initial_cooperation_rate = 0.0; // fraction of matches opened with C
    long wins = 0;
    long draws = 0;
    long losses = 0;
};

struct MatchRecord {
    int x = 0;  // input index of the player seated as X
    int y = 0;
    int repetition = 0;
    std::uint64_t seed = 0;
    long rounds = 0;
    std::string outcomes;  // two letters per round: X's action then Y's
    double mean_x = 0.0;
    double mean_y = 0.0;
};

struct TournamentResult {
    TournamentConfig config;
    // payoff[i][j]: player i's per-round mean against player j, averaged over
    // repetitions, indices in input order.  The diagonal holds self-play
    // means when enabled and NaN otherwise; it never enters the rankings.
    std::vector<std::vector<double>> payoff;
    std::vector<PlayerSummary> summaries;  // sorted: median desc, mean desc, input order
    std::vector<MatchRecord> matches;      // pair enumeration order
};

// Round robin over all unordered pairs (plus self-pairs when enabled),
// repetitions times each.  Per-match seeds are derived from (master seed,
// both players' identities, repetition), and the X/Y roles inside a match are
// assigned by identity order, making every statistic independent of both the
// input order and the pair enumeration order.
TournamentResult round_robin(const TournamentConfig& config);

// X plays a fixed memory-one strategy p while Y redraws its memory-one
// response vector uniformly from q_list every round.  Returns the observed
// outcome frequencies next to the stationary distribution of the chain
// against the per-state average of q_list: the mixture is indistinguishable
// from its average in the long run.
struct AveragingResult {
    Vec4 empirical{};  // outcome frequencies over the simulated rounds, X view
    Vec4 predicted{};  // stationary distribution of M(p, mean(q_list))
    double mean_x = 0.0;
    double mean_y = 0.0;
    long rounds = 0;
};

AveragingResult averaging_experiment(const StrategyVector& p,
                                     const std::vector<StrategyVector>& q_list, long rounds,
                                     std::uint64_t seed, const GameParams& g);

}  // namespace ipd

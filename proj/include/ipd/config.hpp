#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "ipd/players.hpp"
#include "ipd/tournament.hpp"
#include "ipd/zd.hpp"

namespace ipd {

// Insertion-ordered JSON so emitted files are byte-stable.
using Json = nlohmann::ordered_json;

// Any structural problem with user-supplied configuration (unknown kinds,
// missing fields, out-of-range numbers, unreadable files).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A requested derived strategy (extort:/setscore: shorthand) whose
// probabilities leave [0, 1]; distinct from ConfigError so callers can map it
// to the infeasible-strategy exit code.
struct InfeasibleSpec : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Human-readable list like "p3 = 1.125 > 1".
std::string violations_text(const Feasibility& f);
Json to_json(const Feasibility& f);

// value formatted with 12 significant digits ("%.12g")
std::string format_sig(double value);

// The same rounding applied to a double destined for a JSON document, so the
// serialized number carries at most 12 significant digits.
double round_sig(double value);

// Accepts a decimal literal or a fraction "a/b" (e.g. "7/26").
double parse_number(const std::string& text);
// Same, but requires the result to lie in [0, 1].
double parse_probability(const std::string& text);

// --- player specs ---------------------------------------------------------
// {"kind": "cooperator" | "defector" | "tit_for_tat" | "grudger"}
// {"kind": "random", "coop_rate": 0.7}
// {"kind": "memory_one", "p": [p1, p2, p3, p4],
//  "first_move": {"kind": "cooperate" | "defect" | "bernoulli", "rate": 0.5}}   (optional)
// {"kind": "adaptive", "epsilon": 0.1, "k": 20}
// All kinds accept an optional "label".
Json to_json(const FirstMovePolicy& fm);
FirstMovePolicy first_move_from_json(const Json& j);
Json to_json(const PlayerSpec& spec);
PlayerSpec player_from_json(const Json& j);

// Shorthand accepted by CLI flags in place of inline JSON:
//   cooperator | defector | titfortat | grudger | random:RATE
//   m1:P1,P2,P3,P4  |  adaptive:EPS,K  |  extort:CHI,PHI  |  setscore:P1,P4
// Probabilities may be fractions.  extort/setscore build the corresponding
// zero-determinant memory-one vector for `game` and throw ConfigError when it
// is infeasible.
PlayerSpec parse_player_spec(const std::string& text, const GameParams& game);

// --- tournament run configuration -----------------------------------------
// {
//   "game": {"t":5,"r":3,"p":1,"s":0} or [t,r,p,s]   } exactly one
//   "donation": {"b":3,"c":1}                         } of the two
//   "players": [ <player spec>, ... ],                  required, >= 2
//   "length": {"fixed": 200} or {"omega": 0.9},         default fixed 200
//   "repetitions": 30,
//   "include_self_play": false,
//   "seed": 0,
//   "default_first_move": {"kind": "bernoulli", "rate": 0.5}
// }
TournamentConfig tournament_config_from_json(const Json& j);

Json to_json(const GameParams& g);
Json to_json(const MatchLength& length);

// --- tournament outputs ----------------------------------------------------
// summary.csv: rank,player,median_score,mean_score,cooperation_rate,
//              initial_cooperation_rate,wins,draws
std::string summary_csv(const TournamentResult& result);
// payoff_matrix.csv: header "player" + one column per opponent label; the
// diagonal is empty unless self-play was recorded.
std::string payoff_csv(const TournamentResult& result);
// Machine-readable bundle of config echo, rankings and the payoff matrix.
Json to_json(const TournamentResult& result);

// Writes via a temp file in the same directory plus rename, so readers never
// observe a half-written file.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace ipd

#include "ipd/tournament.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ipd {

namespace {

// Stream salts so the length draw and the two players never share a stream.
constexpr std::uint64_t kLengthSalt = 0x6c656e;
constexpr std::uint64_t kXSalt = 0x706c78;
constexpr std::uint64_t kYSalt = 0x706c79;

long draw_length(const MatchLength& length, Rng& rng) {
    if (length.kind == MatchLength::Kind::Fixed) {
        if (length.rounds < 1) throw std::invalid_argument("fixed match length must be >= 1");
        return length.rounds;
    }
    const double omega = length.omega;
    if (!(omega >= 0.0 && omega < 1.0)) {
        throw std::invalid_argument("continuation probability omega must lie in [0, 1)");
    }
    if (omega == 0.0) return 1;
    // Inversion: P(L > k) = omega^k, one uniform per match.
    const double u = rng.uniform();
    return 1 + static_cast<long>(std::floor(std::log1p(-u) / std::log(omega)));
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return std::numeric_limits<double>::quiet_NaN();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double expected_length(double omega) {
    if (!(omega >= 0.0 && omega < 1.0)) {
        throw std::invalid_argument("continuation probability omega must lie in [0, 1)");
    }
    return 1.0 / (1.0 - omega);
}

MatchResult play_match(const PlayerSpec& x, const PlayerSpec& y, const MatchConfig& config) {
    require_valid(config.game);
    require_valid(x);
    require_valid(y);
    Rng length_rng(mix_seed(config.seed, kLengthSalt));
    Rng rng_x(mix_seed(config.seed, kXSalt));
    Rng rng_y(mix_seed(config.seed, kYSalt));
    const long rounds = draw_length(config.length, length_rng);

    MatchResult result;
    result.rounds = rounds;
    result.outcomes.reserve(static_cast<std::size_t>(rounds));
    PlayerState state_x, state_y;
    for (long t = 0; t < rounds; ++t) {
        const Action ax = next_action(x, state_x, rng_x, config.default_first_move);
        const Action ay = next_action(y, state_y, rng_y, config.default_first_move);
        const Outcome ox = outcome_of(ax, ay);
        const Outcome oy = swap_view(ox);
        if (t == 0) {
            result.first_x = ax;
            result.first_y = ay;
        }
        result.outcomes.push_back(ox);
        result.total_x += payoff(config.game, ox);
        result.total_y += payoff(config.game, oy);
        if (ax == Action::C) ++result.coop_x;
        if (ay == Action::C) ++result.coop_y;
        record_outcome(x, state_x, ox);
        record_outcome(y, state_y, oy);
    }
    result.mean_x = result.total_x / static_cast<double>(rounds);
    result.mean_y = result.total_y / static_cast<double>(rounds);
    return result;
}

std::uint64_t player_key(const PlayerSpec& spec) {
    char buf[256];
    const FirstMovePolicy fm = spec.first_move.value_or(FirstMovePolicy{});
    std::snprintf(buf, sizeof(buf),
                  "k%d|p%.17g,%.17g,%.17g,%.17g|f%d,%.17g,%d|c%.17g|e%.17g|w%d|",
                  static_cast<int>(spec.kind), spec.p.p[0], spec.p.p[1], spec.p.p[2],
                  spec.p.p[3], static_cast<int>(fm.kind), fm.rate, spec.first_move ? 1 : 0,
                  spec.coop_rate, spec.epsilon, spec.k);
    std::string key(buf);
    key += display_label(spec);
    return fnv1a64(key);
}

TournamentResult round_robin(const TournamentConfig& config) {
    require_valid(config.game);
    const int n = static_cast<int>(config.players.size());
    if (n < 2) throw std::invalid_argument("round robin needs at least two players");
    if (config.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    for (const auto& spec : config.players) require_valid(spec);

    std::vector<std::uint64_t> keys(config.players.size());
    for (int i = 0; i < n; ++i) keys[i] = player_key(config.players[i]);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> payoff_sum(n, std::vector<double>(n, 0.0));
    std::vector<long> coop_moves(n, 0), total_moves(n, 0), first_coop(n, 0), match_count(n, 0);
    std::vector<long> wins(n, 0), draws(n, 0), losses(n, 0);

    TournamentResult result;
    result.config = config;

    const std::uint64_t master = splitmix64(config.seed);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            if (i == j && !config.include_self_play) continue;
            const std::uint64_t klo = std::min(keys[i], keys[j]);
            const std::uint64_t khi = std::max(keys[i], keys[j]);
            // X plays the smaller identity so roles do not depend on input
            // positions.
            const int xi = keys[i] <= keys[j] ? i : j;
            const int yi = xi == i ? j : i;
            for (int rep = 0; rep < config.repetitions; ++rep) {
                MatchConfig mc;
                mc.game = config.game;
                mc.length = config.length;
                mc.default_first_move = config.default_first_move;
                mc.seed = mix_seed(mix_seed(mix_seed(master, klo), khi),
                                   static_cast<std::uint64_t>(rep));
                const MatchResult r =
                    play_match(config.players[xi], config.players[yi], mc);
                MatchRecord rec;
                rec.x = xi;
                rec.y = yi;
                rec.repetition = rep;
                rec.seed = mc.seed;
                rec.rounds = r.rounds;
                rec.outcomes.reserve(2 * static_cast<std::size_t>(r.rounds));
                for (const Outcome o : r.outcomes) {
                    rec.outcomes += own_action(o) == Action::C ? 'C' : 'D';
                    rec.outcomes += other_action(o) == Action::C ? 'C' : 'D';
                }
                rec.mean_x = r.mean_x;
                rec.mean_y = r.mean_y;
                result.matches.push_back(std::move(rec));
                payoff_sum[xi][yi] += r.mean_x;
                payoff_sum[yi][xi] += r.mean_y;
                if (i == j) continue;  // self-play fills the diagonal only
                coop_moves[xi] += r.coop_x;
                coop_moves[yi] += r.coop_y;
                total_moves[xi] += r.rounds;
                total_moves[yi] += r.rounds;
                if (r.first_x == Action::C) ++first_coop[xi];
                if (r.first_y == Action::C) ++first_coop[yi];
                ++match_count[xi];
                ++match_count[yi];
                if (r.total_x > r.total_y) {
                    ++wins[xi];
                    ++losses[yi];
                } else if (r.total_y > r.total_x) {
                    ++wins[yi];
                    ++losses[xi];
                } else {
                    ++draws[xi];
                    ++draws[yi];
                }
            }
        }
    }

    result.payoff.assign(n, std::vector<double>(n, nan));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j && !config.include_self_play) continue;
            double sum = payoff_sum[i][j];
            // A self-pair plays `repetitions` matches contributing both roles.
            const double denom =
                static_cast<double>(config.repetitions) * (i == j ? 2.0 : 1.0);
            result.payoff[i][j] = sum / denom;
        }
    }

    result.summaries.resize(n);
    for (int i = 0; i < n; ++i) {
        PlayerSummary& s = result.summaries[i];
        s.label = display_label(config.players[i]);
        s.input_index = i;
        std::vector<double> row;
        for (int j = 0; j < n; ++j) {
            if (j != i) row.push_back(result.payoff[i][j]);
        }
        // Summing in sorted order keeps the statistics bit-identical under
        // any permutation of the player list.
        std::sort(row.begin(), row.end());
        s.median_score = median_of(row);
        s.mean_score = std::accumulate(row.begin(), row.end(), 0.0) /
                       static_cast<double>(row.size());
        s.cooperation_rate = total_moves[i] > 0 ? static_cast<double>(coop_moves[i]) /
                                                      static_cast<double>(total_moves[i])
                                                : 0.0;
        s.initial_cooperation_rate =
            match_count[i] > 0
                ? static_cast<double>(first_coop[i]) / static_cast<double>(match_count[i])
                : 0.0;
        s.wins = wins[i];
        s.draws = draws[i];
        s.losses = losses[i];
    }
    std::stable_sort(result.summaries.begin(), result.summaries.end(),
                     [](const PlayerSummary& a, const PlayerSummary& b) {
                         if (a.median_score != b.median_score)
                             return a.median_score > b.median_score;
                         if (a.mean_score != b.mean_score) return a.mean_score > b.mean_score;
                         return a.input_index < b.input_index;
                     });
    for (int r = 0; r < n; ++r) result.summaries[r].rank = r + 1;
    return result;
}

AveragingResult averaging_experiment(const StrategyVector& p,
                                     const std::vector<StrategyVector>& q_list, long rounds,
                                     std::uint64_t seed, const GameParams& g) {
    require_valid(g);
    require_probability_vector(p);
    if (q_list.empty()) throw std::invalid_argument("q_list must not be empty");
    for (const auto& q : q_list) require_probability_vector(q);
    if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");

    StrategyVector qbar;
    for (const auto& q : q_list) {
        for (int i = 0; i < 4; ++i) qbar.p[i] += q.p[i];
    }
    for (int i = 0; i < 4; ++i) qbar.p[i] /= static_cast<double>(q_list.size());

    AveragingResult result;
    result.rounds = rounds;
    result.predicted = stationary_distribution(build_transition_matrix(p, qbar)).v;

    Rng rng_x(mix_seed(seed, kXSalt));
    Rng rng_y(mix_seed(seed, kYSalt));
    std::array<long, 4> counts{0, 0, 0, 0};
    double total_x = 0.0, total_y = 0.0;
    std::optional<Outcome> last_x;  // X's view; Y's view is the swap
    for (long t = 0; t < rounds; ++t) {
        // Y first draws which vector it plays this round, then its action
        // coin; the selection draw happens every round to keep the stream
        // layout fixed.
        const std::size_t pick = rng_y.index(q_list.size());
        Action ax, ay;
        if (!last_x) {
            ax = rng_x.bernoulli(0.5) ? Action::C : Action::D;
            ay = rng_y.bernoulli(0.5) ? Action::C : Action::D;
        } else {
            ax = rng_x.bernoulli(p[*last_x]) ? Action::C : Action::D;
            ay = rng_y.bernoulli(q_list[pick][swap_view(*last_x)]) ? Action::C : Action::D;
        }
        const Outcome ox = outcome_of(ax, ay);
        ++counts[static_cast<int>(ox)];
        total_x += payoff(g, ox);
        total_y += payoff(g, swap_view(ox));
        last_x = ox;
    }
    for (int i = 0; i < 4; ++i) {
        result.empirical[i] = static_cast<double>(counts[i]) / static_cast<double>(rounds);
    }
    result.mean_x = total_x / static_cast<double>(rounds);
    result.mean_y = total_y / static_cast<double>(rounds);
    return result;
}

}  // namespace ipd

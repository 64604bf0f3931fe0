#include "ipd/players.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ipd {

namespace {

std::string short_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

Action resolve_first_move(const FirstMovePolicy& fm, Rng& rng) {
    switch (fm.kind) {
        case FirstMovePolicy::Kind::Cooperate: return Action::C;
        case FirstMovePolicy::Kind::Defect: return Action::D;
        case FirstMovePolicy::Kind::Bernoulli:
            return rng.bernoulli(fm.rate) ? Action::C : Action::D;
    }
    return Action::C;  // unreachable
}

}  // namespace

PlayerSpec PlayerSpec::cooperator() {
    PlayerSpec s;
    s.kind = Kind::Cooperator;
    return s;
}

PlayerSpec PlayerSpec::defector() {
    PlayerSpec s;
    s.kind = Kind::Defector;
    return s;
}

PlayerSpec PlayerSpec::tit_for_tat() {
    PlayerSpec s;
    s.kind = Kind::TitForTat;
    return s;
}

PlayerSpec PlayerSpec::grudger() {
    PlayerSpec s;
    s.kind = Kind::Grudger;
    return s;
}

PlayerSpec PlayerSpec::random(double coop_rate) {
    PlayerSpec s;
    s.kind = Kind::Random;
    s.coop_rate = coop_rate;
    return s;
}

PlayerSpec PlayerSpec::memory_one(const StrategyVector& p,
                                  std::optional<FirstMovePolicy> first_move,
                                  std::string label) {
    PlayerSpec s;
    s.kind = Kind::MemoryOne;
    s.p = p;
    s.first_move = first_move;
    s.label = std::move(label);
    return s;
}

PlayerSpec PlayerSpec::adaptive(double epsilon, int k) {
    PlayerSpec s;
    s.kind = Kind::Adaptive;
    s.epsilon = epsilon;
    s.k = k;
    return s;
}

void require_valid(const PlayerSpec& spec) {
    switch (spec.kind) {
        case PlayerSpec::Kind::Random:
            if (!(spec.coop_rate >= 0.0 && spec.coop_rate <= 1.0)) {
                throw std::invalid_argument("random player needs coop_rate in [0, 1]");
            }
            break;
        case PlayerSpec::Kind::MemoryOne:
            require_probability_vector(spec.p);
            if (spec.first_move && spec.first_move->kind == FirstMovePolicy::Kind::Bernoulli &&
                !(spec.first_move->rate >= 0.0 && spec.first_move->rate <= 1.0)) {
                throw std::invalid_argument("first-move rate must lie in [0, 1]");
            }
            break;
        case PlayerSpec::Kind::Adaptive:
            if (!(spec.epsilon >= 0.0 && spec.epsilon <= 1.0)) {
                throw std::invalid_argument("adaptive player needs epsilon in [0, 1]");
            }
            if (spec.k < 0) throw std::invalid_argument("adaptive player needs k >= 0");
            break;
        default: break;
    }
}

std::string default_label(const PlayerSpec& spec) {
    switch (spec.kind) {
        case PlayerSpec::Kind::Cooperator: return "Cooperator";
        case PlayerSpec::Kind::Defector: return "Defector";
        case PlayerSpec::Kind::TitForTat: return "TitForTat";
        case PlayerSpec::Kind::Grudger: return "Grudger";
        case PlayerSpec::Kind::Random: return "Random(" + short_number(spec.coop_rate) + ")";
        case PlayerSpec::Kind::MemoryOne:
            return "MemoryOne(" + short_number(spec.p.p[0]) + "," + short_number(spec.p.p[1]) +
                   "," + short_number(spec.p.p[2]) + "," + short_number(spec.p.p[3]) + ")";
        case PlayerSpec::Kind::Adaptive:
            return "Adaptive(eps=" + short_number(spec.epsilon) +
                   ",k=" + std::to_string(spec.k) + ")";
    }
    return "Player";
}

std::string display_label(const PlayerSpec& spec) {
    return spec.label.empty() ? default_label(spec) : spec.label;
}

Vec4 estimate_policy(const AdaptiveState& state) {
    Vec4 est;
    for (int i = 0; i < 4; ++i) {
        est[i] = state.n[i] > 0
                     ? static_cast<double>(state.d[i]) / static_cast<double>(state.n[i])
                     : 0.5;
    }
    return est;
}

void adaptive_update(AdaptiveState& state, Outcome prev, Action opponent_action) {
    const int i = static_cast<int>(prev);
    state.n[i] += 1;
    if (opponent_action == Action::C) state.d[i] += 1;
}

Action next_action(const PlayerSpec& spec, const PlayerState& state, Rng& rng,
                   const FirstMovePolicy& default_first_move) {
    if (state.round > 0 && !state.last) {
        throw std::logic_error("missing history: rounds were played but no outcome recorded");
    }
    switch (spec.kind) {
        case PlayerSpec::Kind::Cooperator: return Action::C;
        case PlayerSpec::Kind::Defector: return Action::D;
        case PlayerSpec::Kind::TitForTat:
            if (!state.last) return Action::C;
            return other_action(*state.last);
        case PlayerSpec::Kind::Grudger:
            return state.grudged ? Action::D : Action::C;
        case PlayerSpec::Kind::Random:
            return rng.bernoulli(spec.coop_rate) ? Action::C : Action::D;
        case PlayerSpec::Kind::MemoryOne: {
            if (!state.last) {
                return resolve_first_move(spec.first_move.value_or(default_first_move), rng);
            }
            return rng.bernoulli(spec.p[*state.last]) ? Action::C : Action::D;
        }
        case PlayerSpec::Kind::Adaptive: {
            // Warm-up rounds play uniformly at random with a single draw.
            if (state.round < spec.k) {
                return rng.bernoulli(0.5) ? Action::C : Action::D;
            }
            // Exploration coin first, action coin second: always two draws.
            const bool explore = rng.bernoulli(spec.epsilon);
            double coop_prob = 0.5;
            if (!explore && state.last) {
                coop_prob = estimate_policy(state.adaptive)[static_cast<int>(*state.last)];
            }
            return rng.bernoulli(coop_prob) ? Action::C : Action::D;
        }
    }
    return Action::C;  // unreachable
}

void record_outcome(const PlayerSpec& spec, PlayerState& state, Outcome outcome) {
    if (spec.kind == PlayerSpec::Kind::Adaptive && state.last) {
        adaptive_update(state.adaptive, *state.last, other_action(outcome));
    }
    if (spec.kind == PlayerSpec::Kind::Grudger && other_action(outcome) == Action::D) {
        state.grudged = true;
    }
    state.last = outcome;
    state.round += 1;
}

}  // namespace ipd

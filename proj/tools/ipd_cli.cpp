#include <array>
#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ipd/config.hpp"
#include "ipd/replicator.hpp"

namespace {

using ipd::Json;

constexpr const char* kStrategyNames[3] = {"cooperator", "defector", "tit_for_tat"};

// Accumulates one report as both `key = value` text and a JSON document, so
// either can be emitted (and the JSON reused for output files).
struct Report {
    bool json = false;
    Json doc = Json::object();
    std::string text;

    void kv(const std::string& key, const std::string& value) {
        doc[key] = value;
        text += key + " = " + value + "\n";
    }
    void kv(const std::string& key, const char* value) { kv(key, std::string(value)); }
    void kv(const std::string& key, double value) {
        doc[key] = ipd::round_sig(value);
        text += key + " = " + ipd::format_sig(value) + "\n";
    }
    void kv(const std::string& key, bool value) {
        doc[key] = value;
        text += key + std::string(" = ") + (value ? "true" : "false") + "\n";
    }
    void kv(const std::string& key, long value) {
        doc[key] = value;
        text += key + " = " + std::to_string(value) + "\n";
    }
    void kv(const std::string& key, int value) { kv(key, static_cast<long>(value)); }
    void kv(const std::string& key, std::uint64_t value) {
        doc[key] = value;
        text += key + " = " + std::to_string(value) + "\n";
    }
    // Text-only line; callers add the structured form to doc themselves.
    void line(const std::string& s) { text += s + "\n"; }

    void flush() const {
        if (json) {
            std::cout << doc.dump(2) << "\n";
        } else {
            std::cout << text;
        }
    }
};

void emit_error(bool json, int code, const std::string& message) {
    if (json) {
        const Json e{{"error", Json{{"code", code}, {"message", message}}}};
        std::cerr << e.dump(2) << "\n";
    } else {
        std::cerr << "error: " << message << "\n";
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string vec_text(const double* v, std::size_t n) {
    std::string out = "(";
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ", ";
        out += ipd::format_sig(v[i]);
    }
    return out + ")";
}

Json vec_json(const double* v, std::size_t n) {
    Json arr = Json::array();
    for (std::size_t i = 0; i < n; ++i) arr.push_back(ipd::round_sig(v[i]));
    return arr;
}

ipd::GameParams parse_game(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 4) {
        throw ipd::ConfigError("--game needs four values t,r,p,s: '" + text + "'");
    }
    const ipd::GameParams g{ipd::parse_number(parts[0]), ipd::parse_number(parts[1]),
                            ipd::parse_number(parts[2]), ipd::parse_number(parts[3])};
    ipd::require_valid(g);
    return g;
}

ipd::StrategyVector parse_vector(const std::string& text, const char* flag) {
    const auto parts = split(text, ',');
    if (parts.size() != 4) {
        throw ipd::ConfigError(std::string(flag) + " needs four probabilities: '" + text + "'");
    }
    ipd::StrategyVector v;
    for (int i = 0; i < 4; ++i) v.p[i] = ipd::parse_probability(parts[i]);
    return v;
}

ipd::Vec3 parse_state(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 3) {
        throw ipd::ConfigError("--x0 needs three shares x1,x2,x3: '" + text + "'");
    }
    return {ipd::parse_number(parts[0]), ipd::parse_number(parts[1]),
            ipd::parse_number(parts[2])};
}

ipd::FirstMovePolicy parse_first_move(const std::string& text) {
    if (text == "cooperate") return ipd::FirstMovePolicy::cooperate();
    if (text == "defect") return ipd::FirstMovePolicy::defect();
    if (text == "bernoulli") return ipd::FirstMovePolicy::bernoulli(0.5);
    const std::string prefix = "bernoulli:";
    if (text.rfind(prefix, 0) == 0) {
        return ipd::FirstMovePolicy::bernoulli(
            ipd::parse_probability(text.substr(prefix.size())));
    }
    throw ipd::ConfigError("unknown first-move policy '" + text +
                           "' (cooperate | defect | bernoulli:RATE)");
}

std::uint64_t parse_seed(const std::string& text) {
    if (text.empty() || text[0] == '-') throw ipd::ConfigError("seed must be a non-negative integer");
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (end != text.c_str() + text.size() || errno == ERANGE) {
        throw ipd::ConfigError("cannot parse seed: '" + text + "'");
    }
    return v;
}

const char* score_route_name(ipd::ScoreRoute r) {
    return r == ipd::ScoreRoute::Determinant ? "determinant" : "stationary";
}

const char* stationary_route_name(ipd::StationaryResult::Route r) {
    return r == ipd::StationaryResult::Route::LinearSolve ? "linear_solve" : "power_iteration";
}

const char* stability_name(ipd::FixedPointReport::Stability s) {
    using S = ipd::FixedPointReport::Stability;
    switch (s) {
        case S::Attracting: return "attracting";
        case S::Repelling: return "repelling";
        case S::Saddle: return "saddle";
        case S::Neutral: return "neutral";
    }
    return "neutral";
}

void add_stationary(Report& rep, const ipd::StrategyVector& p, const ipd::StrategyVector& q) {
    try {
        const ipd::StationaryResult st =
            ipd::stationary_distribution(ipd::build_transition_matrix(p, q));
        rep.doc["stationary"] = Json{{"v", vec_json(st.v.data(), 4)},
                                     {"unique", st.unique},
                                     {"route", stationary_route_name(st.route)},
                                     {"iterations", st.iterations}};
        rep.line("stationary = " + vec_text(st.v.data(), 4));
        rep.line(std::string("stationary_unique = ") + (st.unique ? "true" : "false"));
        rep.line(std::string("stationary_route = ") + stationary_route_name(st.route));
    } catch (const ipd::NonConvergence& e) {
        rep.doc["stationary"] = nullptr;
        rep.doc["stationary_error"] = e.what();
        rep.line(std::string("stationary = unavailable (") + e.what() + ")");
    }
}

int report_violations(Report& rep, const ipd::Feasibility& f, const std::string& what) {
    rep.doc["violations"] = ipd::to_json(f);
    rep.line("violations = " + ipd::violations_text(f));
    rep.flush();
    emit_error(rep.json, 2, what + ": " + ipd::violations_text(f));
    return 2;
}

int run(int argc, char** argv, bool& json_mode) {
    CLI::App app{"Iterated prisoner's dilemma toolkit: memory-one strategy analysis, "
                 "zero-determinant constructors, matches, tournaments, and replicator "
                 "dynamics"};
    app.require_subcommand(1);
    std::string format = "text";
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"text", "json"}));

    std::string game_text = "5,3,1,0";

    // scores
    auto* scores_cmd = app.add_subcommand(
        "scores", "Long-run per-round scores of memory-one strategy p against q");
    scores_cmd->fallthrough();
    std::string scores_p, scores_q, scores_route = "auto";
    scores_cmd->add_option("-p,--p", scores_p, "Own strategy p1,p2,p3,p4")->required();
    scores_cmd->add_option("-q,--q", scores_q, "Opponent strategy q1,q2,q3,q4")->required();
    scores_cmd->add_option("--game", game_text, "Payoffs t,r,p,s");
    scores_cmd->add_option("--route", scores_route, "Computation route")
        ->check(CLI::IsMember({"auto", "determinant", "stationary"}));

    // stationary
    auto* stationary_cmd = app.add_subcommand(
        "stationary", "Stationary distribution of the joint chain of p against q");
    stationary_cmd->fallthrough();
    std::string stat_p, stat_q;
    double stat_damping = 0.0;
    long stat_max_iters = 1000000;
    stationary_cmd->add_option("-p,--p", stat_p, "Own strategy p1,p2,p3,p4")->required();
    stationary_cmd->add_option("-q,--q", stat_q, "Opponent strategy q1,q2,q3,q4")->required();
    stationary_cmd->add_option("--damping", stat_damping,
                               "Lazy-chain blend for the power fallback");
    stationary_cmd->add_option("--max-iterations", stat_max_iters,
                               "Power-iteration cap");

    // zd
    auto* zd_cmd = app.add_subcommand("zd", "Zero-determinant strategy constructors");
    zd_cmd->fallthrough();
    zd_cmd->require_subcommand(1);
    auto* setscore_cmd = zd_cmd->add_subcommand(
        "set-score", "Strategy pinning the opponent's score, from free choices p1, p4");
    setscore_cmd->fallthrough();
    std::string ss_p1, ss_p4;
    setscore_cmd->add_option("--p1", ss_p1, "Probability after mutual cooperation")->required();
    setscore_cmd->add_option("--p4", ss_p4, "Probability after mutual defection")->required();
    setscore_cmd->add_option("--game", game_text, "Payoffs t,r,p,s");
    auto* extort_cmd = zd_cmd->add_subcommand(
        "extort", "Extortionate strategy with factor chi and scale phi");
    extort_cmd->fallthrough();
    std::string ex_chi, ex_phi;
    extort_cmd->add_option("--chi", ex_chi, "Extortion factor, >= 1")->required();
    extort_cmd->add_option("--phi", ex_phi, "Scale, in (0, bound]")->required();
    extort_cmd->add_option("--game", game_text, "Payoffs t,r,p,s");
    auto* bound_cmd = zd_cmd->add_subcommand(
        "bound", "Largest feasible phi for an extortion factor");
    bound_cmd->fallthrough();
    std::string bd_chi;
    bound_cmd->add_option("--chi", bd_chi, "Extortion factor, >= 1")->required();
    bound_cmd->add_option("--game", game_text, "Payoffs t,r,p,s");

    // match
    auto* match_cmd = app.add_subcommand("match", "Play one seeded match between two players");
    match_cmd->fallthrough();
    std::string match_x, match_y, match_omega, match_seed = "0";
    std::string match_first = "bernoulli:0.5";
    long match_rounds = 200;
    bool match_transcript = false;
    match_cmd->add_option("--x", match_x, "First player spec")->required();
    match_cmd->add_option("--y", match_y, "Second player spec")->required();
    auto* rounds_opt = match_cmd->add_option("--rounds", match_rounds, "Fixed match length");
    auto* omega_opt =
        match_cmd->add_option("--omega", match_omega, "Continuation probability");
    rounds_opt->excludes(omega_opt);
    omega_opt->excludes(rounds_opt);
    match_cmd->add_option("--seed", match_seed, "Match seed")->envname("IPD_SEED");
    match_cmd->add_option("--game", game_text, "Payoffs t,r,p,s");
    match_cmd->add_option("--first-move", match_first,
                          "Default first move for memory-one players");
    match_cmd->add_flag("--transcript", match_transcript,
                        "Include the full move sequence in the output");

    // tournament
    auto* tournament_cmd =
        app.add_subcommand("tournament", "Round-robin tournament from a JSON config file");
    tournament_cmd->fallthrough();
    std::string tour_config, tour_output = ".", tour_seed;
    tournament_cmd->add_option("--config", tour_config, "Config file path")->required();
    tournament_cmd->add_option("--output", tour_output, "Output directory");
    auto* tour_seed_opt = tournament_cmd
                              ->add_option("--seed", tour_seed, "Master seed override")
                              ->envname("IPD_SEED");

    // replicator
    auto* replicator_cmd = app.add_subcommand(
        "replicator", "Cooperator/Defector/TitForTat replicator dynamics for a donation game");
    replicator_cmd->fallthrough();
    double rep_b = 0.0, rep_c = 0.0;
    std::string rep_omega, rep_x0;
    int rep_grid = 0;
    double rep_step = 0.01, rep_horizon = 500.0;
    long rep_record_every = 10;
    std::string rep_output = ".";
    replicator_cmd->add_option("--b", rep_b, "Donation benefit")->required();
    replicator_cmd->add_option("--c", rep_c, "Donation cost")->required();
    replicator_cmd->add_option("--omega", rep_omega, "Continuation probability")->required();
    auto* x0_opt = replicator_cmd->add_option(
        "--x0", rep_x0, "Initial shares x1,x2,x3; emits one trajectory");
    auto* grid_opt = replicator_cmd->add_option(
        "--grid", rep_grid, "N x N interior grid of starts; emits a basin map");
    x0_opt->excludes(grid_opt);
    grid_opt->excludes(x0_opt);
    replicator_cmd->add_option("--step", rep_step, "Integrator step size");
    replicator_cmd->add_option("--horizon", rep_horizon, "Integration horizon");
    replicator_cmd->add_option("--record-every", rep_record_every,
                               "Keep every k-th trajectory point");
    replicator_cmd->add_option("--output", rep_output, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        json_mode = json_mode || format == "json";
        if (json_mode) {
            emit_error(true, 64, std::string("invalid usage: ") + e.what());
        } else {
            std::cerr << "error: " << e.what() << "\n\n" << app.help() << std::flush;
        }
        return 64;
    }
    json_mode = format == "json";

    Report rep;
    rep.json = json_mode;

    if (scores_cmd->parsed()) {
        const ipd::GameParams g = parse_game(game_text);
        const ipd::StrategyVector p = parse_vector(scores_p, "-p");
        const ipd::StrategyVector q = parse_vector(scores_q, "-q");
        ipd::ScoreRoute route = ipd::ScoreRoute::Auto;
        if (scores_route == "determinant") route = ipd::ScoreRoute::Determinant;
        if (scores_route == "stationary") route = ipd::ScoreRoute::Stationary;
        const ipd::ScoreResult r = ipd::expected_scores(p, q, g, route);
        rep.kv("s_x", r.s_x);
        rep.kv("s_y", r.s_y);
        rep.kv("route", score_route_name(r.route));
        rep.kv("degenerate", r.degenerate);
        add_stationary(rep, p, q);
        rep.flush();
        return 0;
    }

    if (stationary_cmd->parsed()) {
        const ipd::StrategyVector p = parse_vector(stat_p, "-p");
        const ipd::StrategyVector q = parse_vector(stat_q, "-q");
        ipd::PowerIterationOptions opts;
        opts.damping = stat_damping;
        opts.max_iterations = stat_max_iters;
        const ipd::StationaryResult st =
            ipd::stationary_distribution(ipd::build_transition_matrix(p, q), opts);
        rep.doc["v"] = vec_json(st.v.data(), 4);
        rep.line("v = " + vec_text(st.v.data(), 4));
        rep.kv("unique", st.unique);
        rep.kv("route", stationary_route_name(st.route));
        rep.kv("iterations", st.iterations);
        rep.flush();
        return 0;
    }

    if (zd_cmd->parsed() && setscore_cmd->parsed()) {
        const ipd::GameParams g = parse_game(game_text);
        const ipd::SetScoreResult r = ipd::set_opponent_score(
            ipd::parse_probability(ss_p1), ipd::parse_probability(ss_p4), g);
        rep.doc["p"] = vec_json(r.p.p.data(), 4);
        rep.line("p = " + vec_text(r.p.p.data(), 4));
        rep.kv("s_y", r.s_y);
        rep.kv("beta", r.beta);
        rep.kv("gamma", r.gamma);
        rep.kv("feasible", r.ok());
        if (!r.ok()) return report_violations(rep, r.feasibility, "set-score strategy infeasible");
        rep.flush();
        return 0;
    }

    if (zd_cmd->parsed() && extort_cmd->parsed()) {
        const ipd::GameParams g = parse_game(game_text);
        ipd::ExtortionParams params;
        params.chi = ipd::parse_number(ex_chi);
        params.phi = ipd::parse_number(ex_phi);
        const ipd::ExtortionResult r = ipd::extortionate(params, g);
        rep.kv("chi", params.chi);
        rep.kv("phi", params.phi);
        rep.kv("phi_bound", ipd::phi_upper_bound(params.chi, g));
        rep.doc["p"] = vec_json(r.p.p.data(), 4);
        rep.line("p = " + vec_text(r.p.p.data(), 4));
        const ipd::ScorePair best = ipd::extortion_best_case(params.chi, g);
        rep.kv("best_case_s_x", best.s_x);
        rep.kv("best_case_s_y", best.s_y);
        rep.kv("feasible", r.ok());
        if (!r.phi_positive) {
            rep.flush();
            emit_error(json_mode, 2, "extortionate strategy infeasible: phi must be > 0");
            return 2;
        }
        if (!r.ok()) return report_violations(rep, r.feasibility, "extortionate strategy infeasible");
        rep.flush();
        return 0;
    }

    if (zd_cmd->parsed() && bound_cmd->parsed()) {
        const ipd::GameParams g = parse_game(game_text);
        const double chi = ipd::parse_number(bd_chi);
        rep.kv("chi", chi);
        rep.kv("phi_bound", ipd::phi_upper_bound(chi, g));
        rep.flush();
        return 0;
    }

    if (match_cmd->parsed()) {
        const ipd::GameParams g = parse_game(game_text);
        const ipd::PlayerSpec x = ipd::parse_player_spec(match_x, g);
        const ipd::PlayerSpec y = ipd::parse_player_spec(match_y, g);
        ipd::MatchConfig mc;
        mc.game = g;
        if (omega_opt->count() > 0) {
            mc.length = ipd::MatchLength::geometric(ipd::parse_number(match_omega));
        } else {
            mc.length = ipd::MatchLength::fixed(match_rounds);
        }
        mc.seed = parse_seed(match_seed);
        mc.default_first_move = parse_first_move(match_first);
        const ipd::MatchResult r = ipd::play_match(x, y, mc);
        rep.kv("x", ipd::display_label(x));
        rep.kv("y", ipd::display_label(y));
        rep.doc["length"] = ipd::to_json(mc.length);
        rep.kv("seed", mc.seed);
        rep.kv("rounds", r.rounds);
        rep.kv("mean_x", r.mean_x);
        rep.kv("mean_y", r.mean_y);
        rep.kv("total_x", r.total_x);
        rep.kv("total_y", r.total_y);
        rep.kv("coop_rate_x", static_cast<double>(r.coop_x) / static_cast<double>(r.rounds));
        rep.kv("coop_rate_y", static_cast<double>(r.coop_y) / static_cast<double>(r.rounds));
        rep.kv("first_x", r.first_x == ipd::Action::C ? "C" : "D");
        rep.kv("first_y", r.first_y == ipd::Action::C ? "C" : "D");
        std::array<long, 4> counts{0, 0, 0, 0};
        for (const ipd::Outcome o : r.outcomes) ++counts[static_cast<int>(o)];
        rep.doc["counts"] = Json{{"cc", counts[0]}, {"cd", counts[1]},
                                 {"dc", counts[2]}, {"dd", counts[3]}};
        rep.line("count_cc = " + std::to_string(counts[0]));
        rep.line("count_cd = " + std::to_string(counts[1]));
        rep.line("count_dc = " + std::to_string(counts[2]));
        rep.line("count_dd = " + std::to_string(counts[3]));
        if (match_transcript) {
            std::string moves;
            moves.reserve(2 * r.outcomes.size());
            for (const ipd::Outcome o : r.outcomes) {
                moves += ipd::own_action(o) == ipd::Action::C ? 'C' : 'D';
                moves += ipd::other_action(o) == ipd::Action::C ? 'C' : 'D';
            }
            rep.kv("transcript", moves);
        }
        rep.flush();
        return 0;
    }

    if (tournament_cmd->parsed()) {
        std::ifstream in(tour_config, std::ios::binary);
        if (!in) throw ipd::ConfigError("cannot read config file: " + tour_config);
        const Json j = Json::parse(in, nullptr, false);
        if (j.is_discarded()) {
            throw ipd::ConfigError("config file is not valid JSON: " + tour_config);
        }
        ipd::TournamentConfig tc = ipd::tournament_config_from_json(j);
        if (tour_seed_opt->count() > 0) tc.seed = parse_seed(tour_seed);
        const ipd::TournamentResult result = ipd::round_robin(tc);
        namespace fs = std::filesystem;
        const fs::path dir(tour_output);
        const Json bundle = ipd::to_json(result);
        ipd::write_file_atomic((dir / "summary.csv").string(), ipd::summary_csv(result));
        ipd::write_file_atomic((dir / "payoff_matrix.csv").string(), ipd::payoff_csv(result));
        ipd::write_file_atomic((dir / "tournament.json").string(), bundle.dump(2) + "\n");
        if (json_mode) {
            Json out;
            out["output"] = dir.string();
            out["files"] = Json::array({"summary.csv", "payoff_matrix.csv", "tournament.json"});
            out["summaries"] = bundle.at("summaries");
            std::cout << out.dump(2) << "\n";
        } else {
            std::cout << ipd::summary_csv(result);
        }
        return 0;
    }

    if (replicator_cmd->parsed()) {
        const double omega = ipd::parse_number(rep_omega);
        const ipd::GameParams g = ipd::donation_game(ipd::DonationParams{rep_b, rep_c});
        const ipd::ReplicatorMatrix m = ipd::build_full_matrix(g, omega);
        if (!(rep_step > 0.0)) throw ipd::ConfigError("--step must be > 0");
        if (!(rep_horizon > 0.0)) throw ipd::ConfigError("--horizon must be > 0");
        if (rep_record_every < 1) throw ipd::ConfigError("--record-every must be >= 1");
        if (x0_opt->count() == 0 && grid_opt->count() == 0) {
            throw ipd::ConfigError("replicator needs one of --x0 and --grid");
        }

        rep.kv("b", rep_b);
        rep.kv("c", rep_c);
        rep.kv("omega", omega);
        rep.doc["game"] = ipd::to_json(g);
        Json rows = Json::array();
        for (int i = 0; i < 3; ++i) {
            rows.push_back(vec_json(m.a[static_cast<std::size_t>(i)].data(), 3));
            rep.line(std::string("matrix_row_") + kStrategyNames[i] + " = " +
                     vec_text(m.a[static_cast<std::size_t>(i)].data(), 3));
        }
        rep.doc["matrix"] = rows;

        Json lines = Json::array();
        for (const ipd::IndifferenceLine& l : ipd::indifference_lines(m)) {
            lines.push_back(Json{{"between", Json::array({kStrategyNames[l.i], kStrategyNames[l.j]})},
                                 {"c0", ipd::round_sig(l.c0)},
                                 {"c2", ipd::round_sig(l.c2)},
                                 {"c3", ipd::round_sig(l.c3)},
                                 {"degenerate", l.degenerate}});
            std::string txt = std::string("indifference[") + kStrategyNames[l.i] + "," +
                              kStrategyNames[l.j] + "] : ";
            txt += l.degenerate ? "identically zero"
                                : ipd::format_sig(l.c0) + " + " + ipd::format_sig(l.c2) +
                                      "*x2 + " + ipd::format_sig(l.c3) + "*x3 = 0";
            rep.line(txt);
        }
        rep.doc["indifference_lines"] = lines;
        // Where the defector row's advantage vanishes: x3 = c/(omega*b).  The
        // undiscounted ratio c/b is its omega -> 1 limit, reported alongside
        // for reference.
        rep.kv("defector_indifference_x3", rep_c / (omega * rep_b));
        rep.kv("defector_indifference_x3_undiscounted", rep_c / rep_b);

        Json fps = Json::array();
        for (const ipd::FixedPointReport& f : ipd::classify_fixed_points(m)) {
            Json item;
            std::string txt = "fixed_point ";
            switch (f.kind) {
                case ipd::FixedPointReport::Kind::Vertex:
                    item["kind"] = "vertex";
                    item["at"] = kStrategyNames[f.vertex];
                    txt += std::string("vertex ") + kStrategyNames[f.vertex];
                    break;
                case ipd::FixedPointReport::Kind::Edge:
                    item["kind"] = "edge";
                    item["between"] =
                        Json::array({kStrategyNames[f.edge_i], kStrategyNames[f.edge_j]});
                    txt += std::string("edge ") + kStrategyNames[f.edge_i] + "/" +
                           kStrategyNames[f.edge_j];
                    break;
                case ipd::FixedPointReport::Kind::EdgeLine:
                    item["kind"] = "edge_line";
                    item["between"] =
                        Json::array({kStrategyNames[f.edge_i], kStrategyNames[f.edge_j]});
                    txt += std::string("fixed edge ") + kStrategyNames[f.edge_i] + "/" +
                           kStrategyNames[f.edge_j];
                    break;
                case ipd::FixedPointReport::Kind::Interior:
                    item["kind"] = "interior";
                    txt += "interior";
                    break;
            }
            item["location"] = vec_json(f.location.data(), 3);
            item["stability"] = stability_name(f.stability);
            item["eig_re"] = vec_json(f.eig_re.data(), 2);
            item["eig_im"] = vec_json(f.eig_im.data(), 2);
            fps.push_back(item);
            txt += " at " + vec_text(f.location.data(), 3) + ": " +
                   stability_name(f.stability) + " eig_re=" + vec_text(f.eig_re.data(), 2);
            rep.line(txt);
        }
        rep.doc["fixed_points"] = fps;

        namespace fs = std::filesystem;
        const fs::path dir(rep_output);
        ipd::IntegrateOptions opts;
        opts.step = rep_step;
        opts.horizon = rep_horizon;
        opts.record_every = rep_record_every;

        if (x0_opt->count() > 0) {
            const ipd::Vec3 x0 = parse_state(rep_x0);
            const ipd::Trajectory traj = ipd::integrate(x0, m, opts);
            std::string csv = "t,x1,x2,x3\n";
            for (std::size_t k = 0; k < traj.t.size(); ++k) {
                csv += ipd::format_sig(traj.t[k]) + "," + ipd::format_sig(traj.x[k][0]) + "," +
                       ipd::format_sig(traj.x[k][1]) + "," + ipd::format_sig(traj.x[k][2]) +
                       "\n";
            }
            ipd::write_file_atomic((dir / "trajectory.csv").string(), csv);
            const ipd::Vec3& final = traj.x.back();
            rep.doc["final"] = vec_json(final.data(), 3);
            rep.line("final = " + vec_text(final.data(), 3));
            rep.kv("max_drift", traj.max_drift);
            rep.doc["files"] = Json::array({"trajectory.csv", "replicator.json"});
            rep.line("files = trajectory.csv, replicator.json");
        } else {
            const int n = rep_grid;
            if (n < 2) throw ipd::ConfigError("--grid must be >= 2");
            std::string csv = "start_x1,start_x2,start_x3,final_x1,final_x2,final_x3\n";
            long to_coop = 0, to_defect = 0, unresolved = 0;
            for (int i = 1; i <= n; ++i) {
                for (int j = 1; j <= n; ++j) {
                    const double a = static_cast<double>(i) / (n + 1);
                    const double bshare = static_cast<double>(j) / (n + 1);
                    const ipd::Vec3 x0{(1.0 - a) * (1.0 - bshare), a * (1.0 - bshare),
                                       bshare};
                    const ipd::Vec3 xf = ipd::final_state(x0, m, opts);
                    csv += ipd::format_sig(x0[0]) + "," + ipd::format_sig(x0[1]) + "," +
                           ipd::format_sig(x0[2]) + "," + ipd::format_sig(xf[0]) + "," +
                           ipd::format_sig(xf[1]) + "," + ipd::format_sig(xf[2]) + "\n";
                    if (xf[1] < 0.01) {
                        ++to_coop;
                    } else if (xf[1] > 0.99) {
                        ++to_defect;
                    } else {
                        ++unresolved;
                    }
                }
            }
            ipd::write_file_atomic((dir / "basins.csv").string(), csv);
            rep.kv("grid", static_cast<long>(n) * n);
            rep.kv("defectors_die_out", to_coop);
            rep.kv("defectors_take_over", to_defect);
            rep.kv("unresolved", unresolved);
            rep.doc["files"] = Json::array({"basins.csv", "replicator.json"});
            rep.line("files = basins.csv, replicator.json");
        }
        ipd::write_file_atomic((dir / "replicator.json").string(), rep.doc.dump(2) + "\n");
        rep.flush();
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    bool json_mode = false;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--format=json" || (a == "--format" && i + 1 < argc &&
                                     std::string(argv[i + 1]) == "json")) {
            json_mode = true;
        }
    }
    try {
        return run(argc, argv, json_mode);
    } catch (const ipd::InfeasibleSpec& e) {
        emit_error(json_mode, 2, e.what());
        return 2;
    } catch (const ipd::DegenerateTarget& e) {
        emit_error(json_mode, 2, e.what());
        return 2;
    } catch (const ipd::ConfigError& e) {
        emit_error(json_mode, 3, e.what());
        return 3;
    } catch (const std::exception& e) {
        emit_error(json_mode, 3, e.what());
        return 3;
    }
}

#include "ipd/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

namespace ipd {

namespace {

double strict_strtod(const std::string& text) {
    if (text.empty()) throw ConfigError("empty number");
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size()) {
        throw ConfigError("cannot parse number: '" + text + "'");
    }
    if (!std::isfinite(v)) throw ConfigError("number is not finite: '" + text + "'");
    return v;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
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

PlayerSpec checked(PlayerSpec spec) {
    try {
        require_valid(spec);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

double json_number(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw ConfigError(std::string("player spec needs numeric field '") + key + "'");
    }
    return j.at(key).get<double>();
}

}  // namespace

std::string format_sig(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

double round_sig(double value) {
    if (!std::isfinite(value)) return value;
    return std::strtod(format_sig(value).c_str(), nullptr);
}

double parse_number(const std::string& text) {
    const std::size_t slash = text.find('/');
    if (slash == std::string::npos) return strict_strtod(text);
    const double num = strict_strtod(text.substr(0, slash));
    const double den = strict_strtod(text.substr(slash + 1));
    if (den == 0.0) throw ConfigError("fraction has zero denominator: '" + text + "'");
    return num / den;
}

double parse_probability(const std::string& text) {
    const double v = parse_number(text);
    if (!(v >= 0.0 && v <= 1.0)) {
        throw ConfigError("probability out of [0, 1]: '" + text + "'");
    }
    return v;
}

std::string violations_text(const Feasibility& f) {
    std::string out;
    for (const Violation& v : f.violations) {
        if (!out.empty()) out += "; ";
        out += "p" + std::to_string(v.component + 1) + " = " + format_sig(v.value) +
               (v.bound == 0.0 ? " < 0" : " > 1");
    }
    return out;
}

Json to_json(const Feasibility& f) {
    Json arr = Json::array();
    for (const Violation& v : f.violations) {
        arr.push_back(Json{{"component", v.component + 1},
                           {"value", round_sig(v.value)},
                           {"bound", v.bound}});
    }
    return arr;
}

Json to_json(const FirstMovePolicy& fm) {
    switch (fm.kind) {
        case FirstMovePolicy::Kind::Cooperate: return Json{{"kind", "cooperate"}};
        case FirstMovePolicy::Kind::Defect: return Json{{"kind", "defect"}};
        case FirstMovePolicy::Kind::Bernoulli:
            return Json{{"kind", "bernoulli"}, {"rate", fm.rate}};
    }
    return Json{};
}

FirstMovePolicy first_move_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
        throw ConfigError("first_move needs a string field 'kind'");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "cooperate") return FirstMovePolicy::cooperate();
    if (kind == "defect") return FirstMovePolicy::defect();
    if (kind == "bernoulli") return FirstMovePolicy::bernoulli(json_number(j, "rate"));
    throw ConfigError("unknown first_move kind: '" + kind + "'");
}

Json to_json(const PlayerSpec& spec) {
    Json j;
    switch (spec.kind) {
        case PlayerSpec::Kind::Cooperator: j["kind"] = "cooperator"; break;
        case PlayerSpec::Kind::Defector: j["kind"] = "defector"; break;
        case PlayerSpec::Kind::TitForTat: j["kind"] = "tit_for_tat"; break;
        case PlayerSpec::Kind::Grudger: j["kind"] = "grudger"; break;
        case PlayerSpec::Kind::Random:
            j["kind"] = "random";
            j["coop_rate"] = spec.coop_rate;
            break;
        case PlayerSpec::Kind::MemoryOne:
            j["kind"] = "memory_one";
            j["p"] = Json::array({spec.p.p[0], spec.p.p[1], spec.p.p[2], spec.p.p[3]});
            if (spec.first_move) j["first_move"] = to_json(*spec.first_move);
            break;
        case PlayerSpec::Kind::Adaptive:
            j["kind"] = "adaptive";
            j["epsilon"] = spec.epsilon;
            j["k"] = spec.k;
            break;
    }
    if (!spec.label.empty()) j["label"] = spec.label;
    return j;
}

PlayerSpec player_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
        throw ConfigError("player spec needs a string field 'kind'");
    }
    const std::string kind = j.at("kind").get<std::string>();
    PlayerSpec spec;
    if (kind == "cooperator") {
        spec = PlayerSpec::cooperator();
    } else if (kind == "defector") {
        spec = PlayerSpec::defector();
    } else if (kind == "tit_for_tat") {
        spec = PlayerSpec::tit_for_tat();
    } else if (kind == "grudger") {
        spec = PlayerSpec::grudger();
    } else if (kind == "random") {
        spec = PlayerSpec::random(json_number(j, "coop_rate"));
    } else if (kind == "memory_one") {
        if (!j.contains("p") || !j.at("p").is_array() || j.at("p").size() != 4) {
            throw ConfigError("memory_one spec needs a 4-element array 'p'");
        }
        StrategyVector p;
        for (int i = 0; i < 4; ++i) {
            if (!j.at("p")[i].is_number()) {
                throw ConfigError("memory_one 'p' entries must be numbers");
            }
            p.p[i] = j.at("p")[i].get<double>();
        }
        std::optional<FirstMovePolicy> fm;
        if (j.contains("first_move")) fm = first_move_from_json(j.at("first_move"));
        spec = PlayerSpec::memory_one(p, fm);
    } else if (kind == "adaptive") {
        const double eps = json_number(j, "epsilon");
        if (!j.contains("k") || !j.at("k").is_number_integer()) {
            throw ConfigError("adaptive spec needs an integer field 'k'");
        }
        spec = PlayerSpec::adaptive(eps, j.at("k").get<int>());
    } else {
        throw ConfigError("unknown player kind: '" + kind + "'");
    }
    if (j.contains("label")) {
        if (!j.at("label").is_string()) throw ConfigError("'label' must be a string");
        spec.label = j.at("label").get<std::string>();
    }
    return checked(spec);
}

PlayerSpec parse_player_spec(const std::string& text, const GameParams& game) {
    if (!text.empty() && text.front() == '{') {
        Json j = Json::parse(text, nullptr, false);
        if (j.is_discarded()) throw ConfigError("player spec is not valid JSON: " + text);
        return player_from_json(j);
    }
    const std::size_t colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "cooperator") return PlayerSpec::cooperator();
    if (head == "defector") return PlayerSpec::defector();
    if (head == "titfortat" || head == "tit_for_tat") return PlayerSpec::tit_for_tat();
    if (head == "grudger") return PlayerSpec::grudger();
    if (head == "random") {
        return checked(PlayerSpec::random(parse_probability(tail)));
    }
    if (head == "m1" || head == "memory_one") {
        const auto parts = split(tail, ',');
        if (parts.size() != 4) {
            throw ConfigError("m1 shorthand needs four probabilities: " + text);
        }
        StrategyVector p;
        for (int i = 0; i < 4; ++i) p.p[i] = parse_probability(parts[i]);
        return checked(PlayerSpec::memory_one(p));
    }
    if (head == "adaptive") {
        const auto parts = split(tail, ',');
        if (parts.size() != 2) throw ConfigError("adaptive shorthand needs eps,k: " + text);
        const double eps = parse_probability(parts[0]);
        const long k = std::lround(strict_strtod(parts[1]));
        return checked(PlayerSpec::adaptive(eps, static_cast<int>(k)));
    }
    if (head == "extort") {
        const auto parts = split(tail, ',');
        if (parts.size() != 2) throw ConfigError("extort shorthand needs chi,phi: " + text);
        ExtortionParams ep;
        ep.chi = parse_number(parts[0]);
        ep.phi = parse_number(parts[1]);
        const ExtortionResult r = extortionate(ep, game);
        if (!r.ok()) {
            throw InfeasibleSpec("extortionate strategy infeasible: " +
                                 (r.phi_positive ? violations_text(r.feasibility)
                                                 : std::string("phi must be > 0")));
        }
        PlayerSpec spec = PlayerSpec::memory_one(r.p);
        spec.label = "Extort(chi=" + parts[0] + ",phi=" + parts[1] + ")";
        return checked(spec);
    }
    if (head == "setscore") {
        const auto parts = split(tail, ',');
        if (parts.size() != 2) throw ConfigError("setscore shorthand needs p1,p4: " + text);
        const SetScoreResult r =
            set_opponent_score(parse_probability(parts[0]), parse_probability(parts[1]), game);
        if (!r.ok()) {
            throw InfeasibleSpec("set-score strategy infeasible: " +
                                 violations_text(r.feasibility));
        }
        PlayerSpec spec = PlayerSpec::memory_one(r.p);
        spec.label = "SetScore(" + format_sig(r.s_y) + ")";
        return checked(spec);
    }
    throw ConfigError("unknown player spec: '" + text + "'");
}

Json to_json(const GameParams& g) {
    return Json{{"t", g.t}, {"r", g.r}, {"p", g.p}, {"s", g.s}};
}

Json to_json(const MatchLength& length) {
    if (length.kind == MatchLength::Kind::Fixed) return Json{{"fixed", length.rounds}};
    return Json{{"omega", length.omega}};
}

TournamentConfig tournament_config_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("tournament config must be a JSON object");
    TournamentConfig config;
    const bool has_game = j.contains("game");
    const bool has_donation = j.contains("donation");
    if (has_game == has_donation) {
        throw ConfigError("config needs exactly one of 'game' and 'donation'");
    }
    if (has_game) {
        const Json& g = j.at("game");
        if (g.is_array() && g.size() == 4) {
            config.game = GameParams{g[0].get<double>(), g[1].get<double>(),
                                     g[2].get<double>(), g[3].get<double>()};
        } else if (g.is_object()) {
            config.game = GameParams{json_number(g, "t"), json_number(g, "r"),
                                     json_number(g, "p"), json_number(g, "s")};
        } else {
            throw ConfigError("'game' must be [t,r,p,s] or {t,r,p,s}");
        }
    } else {
        const Json& d = j.at("donation");
        if (!d.is_object()) throw ConfigError("'donation' must be an object {b,c}");
        try {
            config.game = donation_game(DonationParams{json_number(d, "b"), json_number(d, "c")});
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (auto err = validate(config.game)) throw ConfigError(err->message);

    if (!j.contains("players") || !j.at("players").is_array()) {
        throw ConfigError("config needs a 'players' array");
    }
    for (const Json& p : j.at("players")) config.players.push_back(player_from_json(p));
    if (config.players.size() < 2) throw ConfigError("config needs at least two players");

    if (j.contains("length")) {
        const Json& l = j.at("length");
        if (l.is_object() && l.contains("fixed")) {
            if (!l.at("fixed").is_number_integer() || l.at("fixed").get<long>() < 1) {
                throw ConfigError("'length.fixed' must be a positive integer");
            }
            config.length = MatchLength::fixed(l.at("fixed").get<long>());
        } else if (l.is_object() && l.contains("omega")) {
            const double omega = json_number(l, "omega");
            if (!(omega >= 0.0 && omega < 1.0)) {
                throw ConfigError("'length.omega' must lie in [0, 1)");
            }
            config.length = MatchLength::geometric(omega);
        } else {
            throw ConfigError("'length' must be {\"fixed\": n} or {\"omega\": w}");
        }
    }
    if (j.contains("repetitions")) {
        if (!j.at("repetitions").is_number_integer() || j.at("repetitions").get<int>() < 1) {
            throw ConfigError("'repetitions' must be a positive integer");
        }
        config.repetitions = j.at("repetitions").get<int>();
    }
    if (j.contains("include_self_play")) {
        if (!j.at("include_self_play").is_boolean()) {
            throw ConfigError("'include_self_play' must be a boolean");
        }
        config.include_self_play = j.at("include_self_play").get<bool>();
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer()) {
            throw ConfigError("'seed' must be an integer");
        }
        config.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("default_first_move")) {
        config.default_first_move = first_move_from_json(j.at("default_first_move"));
    }
    return config;
}

std::string summary_csv(const TournamentResult& result) {
    std::string out =
        "rank,player,median_score,mean_score,cooperation_rate,initial_cooperation_rate,"
        "wins,draws\n";
    for (const PlayerSummary& s : result.summaries) {
        out += std::to_string(s.rank) + "," + csv_escape(s.label) + "," +
               format_sig(s.median_score) + "," + format_sig(s.mean_score) + "," +
               format_sig(s.cooperation_rate) + "," + format_sig(s.initial_cooperation_rate) +
               "," + std::to_string(s.wins) + "," + std::to_string(s.draws) + "\n";
    }
    return out;
}

std::string payoff_csv(const TournamentResult& result) {
    const auto& players = result.config.players;
    std::string out = "player";
    for (const auto& p : players) out += "," + csv_escape(display_label(p));
    out += "\n";
    for (std::size_t i = 0; i < players.size(); ++i) {
        out += csv_escape(display_label(players[i]));
        for (std::size_t j = 0; j < players.size(); ++j) {
            const double v = result.payoff[i][j];
            out += ",";
            if (!std::isnan(v)) out += format_sig(v);
        }
        out += "\n";
    }
    return out;
}

Json to_json(const TournamentResult& result) {
    Json j;
    j["game"] = to_json(result.config.game);
    j["length"] = to_json(result.config.length);
    j["repetitions"] = result.config.repetitions;
    j["include_self_play"] = result.config.include_self_play;
    j["seed"] = result.config.seed;
    j["default_first_move"] = to_json(result.config.default_first_move);
    Json players = Json::array();
    for (const auto& p : result.config.players) {
        Json spec = to_json(p);
        if (!spec.contains("label")) spec["label"] = display_label(p);
        players.push_back(spec);
    }
    j["players"] = players;
    Json summaries = Json::array();
    for (const PlayerSummary& s : result.summaries) {
        summaries.push_back(Json{{"rank", s.rank},
                                 {"label", s.label},
                                 {"median_score", round_sig(s.median_score)},
                                 {"mean_score", round_sig(s.mean_score)},
                                 {"cooperation_rate", round_sig(s.cooperation_rate)},
                                 {"initial_cooperation_rate",
                                  round_sig(s.initial_cooperation_rate)},
                                 {"wins", s.wins},
                                 {"draws", s.draws},
                                 {"losses", s.losses}});
    }
    j["summaries"] = summaries;
    Json labels = Json::array();
    for (const auto& p : result.config.players) labels.push_back(display_label(p));
    Json rows = Json::array();
    for (const auto& row : result.payoff) {
        Json r = Json::array();
        for (double v : row) {
            if (std::isnan(v)) {
                r.push_back(nullptr);
            } else {
                r.push_back(round_sig(v));
            }
        }
        rows.push_back(r);
    }
    j["payoff_matrix"] = Json{{"labels", labels}, {"rows", rows}};
    Json matches = Json::array();
    for (const MatchRecord& m : result.matches) {
        matches.push_back(Json{{"x", m.x},
                               {"y", m.y},
                               {"repetition", m.repetition},
                               {"seed", m.seed},
                               {"rounds", m.rounds},
                               {"outcomes", m.outcomes}});
    }
    j["matches"] = matches;
    return j;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot open for writing: " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw ConfigError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw ConfigError("cannot rename " + tmp.string() + " to " + path);
}

}  // namespace ipd

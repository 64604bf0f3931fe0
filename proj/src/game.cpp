#include "ipd/game.hpp"

namespace ipd {

std::optional<ParamError> validate(const GameParams& g) {
    const std::array<std::pair<const char*, double>, 4> vals = {
        {{"t", g.t}, {"r", g.r}, {"p", g.p}, {"s", g.s}}};
    for (const auto& [name, v] : vals) {
        if (!std::isfinite(v)) {
            return ParamError{ParamError::Kind::NonFinite,
                              std::string("parameter ") + name + " is not finite"};
        }
    }
    const std::array<std::pair<const char*, bool>, 3> order = {
        {{"t > r", g.t > g.r}, {"r > p", g.r > g.p}, {"p > s", g.p > g.s}}};
    for (const auto& [pair, ok] : order) {
        if (!ok) {
            return ParamError{ParamError::Kind::OrderingViolation,
                              std::string("ordering violated: require ") + pair};
        }
    }
    return std::nullopt;
}

void require_valid(const GameParams& g) {
    if (auto err = validate(g)) throw std::invalid_argument(err->message);
}

GameParams donation_game(const DonationParams& d) {
    if (!(std::isfinite(d.b) && std::isfinite(d.c))) {
        throw std::invalid_argument("donation parameters must be finite");
    }
    if (!(d.b > d.c && d.c > 0.0)) {
        throw std::invalid_argument("donation game requires b > c > 0");
    }
    return GameParams{d.b, d.b - d.c, 0.0, -d.c};
}

}  // namespace ipd

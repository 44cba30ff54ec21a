#include "ib/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace ib {

namespace {

HobModel::RoundSpec parse_round_spec(const nlohmann::json& j) {
    HobModel::RoundSpec spec;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "uniform") {
        spec.kind = HobModel::Kind::uniform;
    } else if (kind == "trunc_normal") {
        spec.kind = HobModel::Kind::trunc_normal;
        spec.mu = j.at("mu").get<double>();
        spec.sigma = j.at("sigma").get<double>();
    } else if (kind == "beta") {
        spec.kind = HobModel::Kind::beta_shaped;
        spec.alpha = j.at("alpha").get<double>();
        spec.beta = j.at("beta").get<double>();
    } else if (kind == "empirical") {
        spec.kind = HobModel::Kind::empirical;
    } else {
        throw std::invalid_argument("scenario: unknown hob kind '" + kind + "'");
    }
    return spec;
}

nlohmann::json round_spec_to_json(const HobModel& hob, int h) {
    nlohmann::json j;
    const auto& spec = hob.spec(h);
    switch (spec.kind) {
        case HobModel::Kind::uniform:
            j["kind"] = "uniform";
            break;
        case HobModel::Kind::trunc_normal:
            j["kind"] = "trunc_normal";
            j["mu"] = spec.mu;
            j["sigma"] = spec.sigma;
            break;
        case HobModel::Kind::beta_shaped:
            j["kind"] = "beta";
            j["alpha"] = spec.alpha;
            j["beta"] = spec.beta;
            break;
        case HobModel::Kind::empirical:
            j["kind"] = "empirical";
            break;
    }
    return j;
}

}  // namespace

Scenario parse_scenario(const nlohmann::json& j) {
    Scenario s;
    s.config.rounds = j.at("rounds").get<int>();
    s.config.episodes = j.at("episodes").get<int>();
    s.config.value_per_conversion = j.at("value_per_conversion").get<double>();
    s.config.auction = auction_format_from_string(j.at("auction_format").get<std::string>());
    s.config.seed = j.value("seed", std::uint64_t{0});
    s.config.delta = j.value("delta", 0.05);

    const auto& grid = j.at("bid_grid");
    if (grid.is_array())
        s.config.grid.bids = grid.get<std::vector<double>>();
    else
        s.config.grid = BidGrid::uniform(grid.at("points").get<int>());

    const auto& inc = j.at("incrementality");
    s.params.beta = inc.at("beta").get<std::vector<std::vector<double>>>();
    s.params.lambda = inc.at("lambda").get<std::vector<double>>();
    const auto& b = inc.at("bounds");
    s.params.bounds.c_beta = b.at("c_beta").get<double>();
    s.params.bounds.C_beta = b.at("C_beta").get<double>();
    s.params.bounds.c_lambda = b.at("c_lambda").get<double>();
    s.params.bounds.C_lambda = b.at("C_lambda").get<double>();
    s.params.bounds.C_T = b.at("C_T").get<double>();

    const auto& hob = j.at("hob");
    std::vector<HobModel::RoundSpec> specs;
    if (hob.is_array()) {
        for (const auto& r : hob) specs.push_back(parse_round_spec(r));
        if (static_cast<int>(specs.size()) != s.config.rounds)
            throw std::invalid_argument("scenario: hob array does not match rounds");
    } else {
        specs.assign(s.config.rounds, parse_round_spec(hob));
    }
    bool any_empirical = false;
    for (const auto& spec : specs) any_empirical |= spec.kind == HobModel::Kind::empirical;
    s.hob = any_empirical ? HobModel::empirical(s.config.rounds)
                          : HobModel::parametric(std::move(specs));

    s.agent.delta = s.config.delta;
    s.agent.bounds = s.params.bounds;
    if (j.contains("agent")) {
        const auto& a = j.at("agent");
        s.agent.kappa = a.value("kappa", s.agent.kappa);
        s.agent.bernstein_c = a.value("bernstein_c", s.agent.bernstein_c);
        if (a.contains("exploration_override"))
            s.agent.exploration_override = a.at("exploration_override").get<long long>();
    }

    const auto errors = validate_scenario(s.config, s.params);
    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "invalid scenario:";
        for (const auto& e : errors) msg << "\n  - " << e;
        throw std::invalid_argument(msg.str());
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path.string());
    nlohmann::json j;
    in >> j;
    return parse_scenario(j);
}

nlohmann::json scenario_to_json(const Scenario& s) {
    nlohmann::json j;
    j["rounds"] = s.config.rounds;
    j["episodes"] = s.config.episodes;
    j["value_per_conversion"] = s.config.value_per_conversion;
    j["auction_format"] = to_string(s.config.auction);
    j["seed"] = s.config.seed;
    j["delta"] = s.config.delta;
    j["bid_grid"] = s.config.grid.bids;
    j["incrementality"] = {{"beta", s.params.beta},
                           {"lambda", s.params.lambda},
                           {"bounds",
                            {{"c_beta", s.params.bounds.c_beta},
                             {"C_beta", s.params.bounds.C_beta},
                             {"c_lambda", s.params.bounds.c_lambda},
                             {"C_lambda", s.params.bounds.C_lambda},
                             {"C_T", s.params.bounds.C_T}}}};
    nlohmann::json hob = nlohmann::json::array();
    for (int h = 1; h <= s.config.rounds; ++h) hob.push_back(round_spec_to_json(s.hob, h));
    j["hob"] = hob;
    nlohmann::json agent;
    agent["kappa"] = s.agent.kappa;
    agent["bernstein_c"] = s.agent.bernstein_c;
    if (s.agent.exploration_override)
        agent["exploration_override"] = *s.agent.exploration_override;
    j["agent"] = agent;
    return j;
}

}  // namespace ib

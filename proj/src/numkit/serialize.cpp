#include "forl/numkit/serialize.hpp"

#include <stdexcept>
#include <string>

namespace forl::num {

using nlohmann::json;

json to_json(const MlpParams& p) {
    json acts = json::array();
    for (auto a : p.hidden_activations()) acts.push_back(to_string(a));
    return json{{"widths", p.widths()},
                {"activations", acts},
                {"params", std::vector<double>(p.flat().begin(), p.flat().end())}};
}

MlpParams mlp_from_json(const json& j) {
    auto widths = j.at("widths").get<std::vector<std::size_t>>();
    std::vector<Activation> acts;
    for (const auto& a : j.at("activations")) acts.push_back(activation_from_string(a.get<std::string>()));
    MlpParams p(std::move(widths), std::move(acts));
    auto flat = j.at("params").get<std::vector<double>>();
    if (flat.size() != p.num_params()) {
        throw std::runtime_error("checkpoint: expected " + std::to_string(p.num_params()) + " parameters, found " +
                                 std::to_string(flat.size()));
    }
    std::copy(flat.begin(), flat.end(), p.flat().begin());
    if (!p.all_finite()) throw std::runtime_error("checkpoint: non-finite parameter");
    return p;
}

json to_json(const AdamState& s) {
    return json{{"lr", s.config.lr},     {"beta1", s.config.beta1}, {"beta2", s.config.beta2},
                {"eps", s.config.eps},   {"step", s.step},          {"m", s.m},
                {"v", s.v}};
}

AdamState adam_from_json(const json& j) {
    AdamState s;
    s.config.lr = j.at("lr").get<double>();
    s.config.beta1 = j.at("beta1").get<double>();
    s.config.beta2 = j.at("beta2").get<double>();
    s.config.eps = j.at("eps").get<double>();
    s.step = j.at("step").get<std::uint64_t>();
    s.m = j.at("m").get<std::vector<double>>();
    s.v = j.at("v").get<std::vector<double>>();
    if (s.m.size() != s.v.size()) throw std::runtime_error("checkpoint: Adam moment sizes differ");
    return s;
}

json to_json(const Rng::State& s) {
    json words = json::array();
    for (auto w : s.words) words.push_back(std::to_string(w));
    return json{{"algorithm", Rng::kAlgorithm},
                {"words", words},
                {"seed", std::to_string(s.seed)},
                {"stream", std::to_string(s.stream)},
                {"has_spare", s.has_spare},
                {"spare", s.spare}};
}

Rng::State rng_state_from_json(const json& j) {
    if (j.at("algorithm").get<std::string>() != Rng::kAlgorithm) {
        throw std::runtime_error("checkpoint: unsupported RNG algorithm");
    }
    Rng::State s;
    const auto& words = j.at("words");
    if (words.size() != 4) throw std::runtime_error("checkpoint: RNG state needs 4 words");
    for (std::size_t i = 0; i < 4; ++i) s.words[i] = std::stoull(words[i].get<std::string>());
    s.seed = std::stoull(j.at("seed").get<std::string>());
    s.stream = std::stoull(j.at("stream").get<std::string>());
    s.has_spare = j.at("has_spare").get<bool>();
    s.spare = j.at("spare").get<double>();
    return s;
}

}  // namespace forl::num

#include "pbftpool/config_io.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pbftpool {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const char* section,
                         std::initializer_list<const char*> known) {
    for (const auto& [key, _] : obj.items()) {
        bool found = false;
        for (const char* k : known)
            if (key == k) { found = true; break; }
        if (!found)
            throw ConfigError(fmt::format("unknown key \"{}\" in \"{}\"", key, section));
    }
}

template <typename T>
void read_field(const json& obj, const char* key, T& into) {
    if (auto it = obj.find(key); it != obj.end()) {
        if constexpr (std::is_same_v<T, int>) {
            if (!it->is_number_integer())
                throw ConfigError(fmt::format("\"{}\" must be an integer", key));
        } else {
            if (!it->is_number())
                throw ConfigError(fmt::format("\"{}\" must be a number", key));
        }
        into = it->get<T>();
    }
}

}  // namespace

ModelConfig parse_model_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(fmt::format("malformed JSON: {}", e.what()));
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");
    reject_unknown_keys(root, "<root>", {"model", "costs", "weights"});

    ModelConfig cfg;
    if (auto it = root.find("model"); it != root.end()) {
        const json& m = *it;
        if (!m.is_object()) throw ConfigError("\"model\" must be an object");
        reject_unknown_keys(m, "model",
                            {"f", "n_total", "k_capacity", "lambda", "mu_h", "xi",
                             "mu_r", "beta_h", "beta_w"});
        read_field(m, "f", cfg.params.f);
        read_field(m, "n_total", cfg.params.n_total);
        read_field(m, "k_capacity", cfg.params.k_capacity);
        read_field(m, "lambda", cfg.params.lambda);
        read_field(m, "mu_h", cfg.params.mu_h);
        read_field(m, "xi", cfg.params.xi);
        read_field(m, "mu_r", cfg.params.mu_r);
        read_field(m, "beta_h", cfg.params.beta_h);
        read_field(m, "beta_w", cfg.params.beta_w);
    }
    if (auto it = root.find("costs"); it != root.end()) {
        const json& c = *it;
        if (!c.is_object()) throw ConfigError("\"costs\" must be an object");
        reject_unknown_keys(c, "costs", {"c_h", "c_w", "c_r", "c_hw", "c_wh"});
        read_field(c, "c_h", cfg.costs.c_h);
        read_field(c, "c_w", cfg.costs.c_w);
        read_field(c, "c_r", cfg.costs.c_r);
        read_field(c, "c_hw", cfg.costs.c_hw);
        read_field(c, "c_wh", cfg.costs.c_wh);
    }
    if (auto it = root.find("weights"); it != root.end()) {
        const json& w = *it;
        if (!w.is_object()) throw ConfigError("\"weights\" must be an object");
        reject_unknown_keys(w, "weights", {"w1", "w2", "w3"});
        read_field(w, "w1", cfg.weights.w1);
        read_field(w, "w2", cfg.weights.w2);
        read_field(w, "w3", cfg.weights.w3);
    }
    return cfg;
}

ModelConfig load_model_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config file \"{}\"", path));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model_config(buf.str());
}

std::string to_json_string(const ModelConfig& cfg) {
    json root;
    root["model"] = {{"f", cfg.params.f},
                     {"n_total", cfg.params.n_total},
                     {"k_capacity", cfg.params.k_capacity},
                     {"lambda", cfg.params.lambda},
                     {"mu_h", cfg.params.mu_h},
                     {"xi", cfg.params.xi},
                     {"mu_r", cfg.params.mu_r},
                     {"beta_h", cfg.params.beta_h},
                     {"beta_w", cfg.params.beta_w}};
    root["costs"] = {{"c_h", cfg.costs.c_h},
                     {"c_w", cfg.costs.c_w},
                     {"c_r", cfg.costs.c_r},
                     {"c_hw", cfg.costs.c_hw},
                     {"c_wh", cfg.costs.c_wh}};
    root["weights"] = {{"w1", cfg.weights.w1}, {"w2", cfg.weights.w2}, {"w3", cfg.weights.w3}};
    return root.dump(2);
}

}  // namespace pbftpool

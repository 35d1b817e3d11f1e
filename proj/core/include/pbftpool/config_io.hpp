#pragma once

#include <stdexcept>
#include <string>

#include "pbftpool/params.hpp"

namespace pbftpool {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelConfig {
    SystemParams params;
    CostParams costs;
    ObjectiveWeights weights;
};

// JSON layout:
//   {"model":   {f, n_total, k_capacity, lambda, mu_h, xi, mu_r, beta_h, beta_w},
//    "costs":   {c_h, c_w, c_r, c_hw, c_wh},
//    "weights": {w1, w2, w3}}
// Every key is optional and falls back to the defaults; unknown keys are
// rejected. Throws ConfigError on unreadable files or malformed JSON.
ModelConfig load_model_config(const std::string& path);
ModelConfig parse_model_config(const std::string& json_text);

std::string to_json_string(const ModelConfig& config);

}  // namespace pbftpool

#pragma once
// Run configuration: flat key = value file, env overrides for gateway secrets.

#include <cstdint>
#include <string>

#include "omx/gateway.hpp"

namespace omx {

enum class PromptStyle { Base, Patterns };

struct RunConfig {
    int anchors_k = 10;
    int candidates_k = 5;
    int hops = 1;
    int superclass_depth = 5;
    int token_budget = 6500;
    PromptStyle prompt_style = PromptStyle::Base;
    gateway::GatewayConfig gateway;
    std::uint64_t seed = 0;

    void check() const;  // throws std::invalid_argument on bad values
};

RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

// LLM_API_BASE / LLM_API_KEY / LLM_MODEL override file values.
void apply_env_overrides(RunConfig& cfg);

}  // namespace omx

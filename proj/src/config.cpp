#include "omx/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace omx {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string unquote(std::string v) {
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                          (v.front() == '\'' && v.back() == '\'')))
        return v.substr(1, v.size() - 2);
    return v;
}

}  // namespace

void RunConfig::check() const {
    if (anchors_k < 1 || candidates_k < 1 || superclass_depth < 1)
        throw std::invalid_argument("counts must be >= 1");
    if (hops < 0) throw std::invalid_argument("hops must be >= 0");
    if (token_budget < 256) throw std::invalid_argument("token_budget must be >= 256");
    if (gateway.max_concurrent < 1)
        throw std::invalid_argument("max_concurrent must be >= 1");
    if (gateway.retry_limit < 0)
        throw std::invalid_argument("retry_limit must be >= 0");
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;  // section headers ignored
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = unquote(trim(line.substr(eq + 1)));

        if (key == "anchors_k") cfg.anchors_k = std::stoi(value);
        else if (key == "candidates_k") cfg.candidates_k = std::stoi(value);
        else if (key == "hops") cfg.hops = std::stoi(value);
        else if (key == "superclass_depth") cfg.superclass_depth = std::stoi(value);
        else if (key == "token_budget") cfg.token_budget = std::stoi(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "prompt_style") {
            if (value == "base") cfg.prompt_style = PromptStyle::Base;
            else if (value == "patterns") cfg.prompt_style = PromptStyle::Patterns;
            else throw std::invalid_argument("unknown prompt_style: " + value);
        } else if (key == "backend") {
            if (value == "http") cfg.gateway.backend = gateway::BackendKind::Http;
            else if (value == "mock") cfg.gateway.backend = gateway::BackendKind::Mock;
            else throw std::invalid_argument("unknown backend: " + value);
        } else if (key == "base_url") cfg.gateway.base_url = value;
        else if (key == "api_key") cfg.gateway.api_key = value;
        else if (key == "model") cfg.gateway.model = value;
        else if (key == "max_concurrent") cfg.gateway.max_concurrent = std::stoi(value);
        else if (key == "retry_limit") cfg.gateway.retry_limit = std::stoi(value);
        else if (key == "fixtures") cfg.gateway.fixture_path = value;
        else if (key == "embedding_dim") cfg.gateway.embedding_dim = std::stoul(value);
        else
            throw std::invalid_argument("unknown config key: " + key);
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw std::invalid_argument("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    auto cfg = parse_config(ss.str());
    apply_env_overrides(cfg);
    cfg.check();
    return cfg;
}

void apply_env_overrides(RunConfig& cfg) {
    if (const char* v = std::getenv("LLM_API_BASE")) cfg.gateway.base_url = v;
    if (const char* v = std::getenv("LLM_API_KEY")) cfg.gateway.api_key = v;
    if (const char* v = std::getenv("LLM_MODEL")) cfg.gateway.model = v;
}

}  // namespace omx

#pragma once
// Uniform chat-completion / embedding client with retries, a concurrency cap,
// and a deterministic mock backend for tests.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "omx/space_reduction.hpp"

namespace omx::gateway {

enum class Role { System, User, Assistant };

struct ChatMessage {
    Role role = Role::User;
    std::string content;
};

std::string role_name(Role r);

struct ChatRequest {
    std::vector<ChatMessage> messages;
    std::string model;
    double temperature = 0.0;
    int max_tokens = 4096;
    std::optional<std::int64_t> seed;
};

enum class BackendKind { Http, Mock };

struct GatewayConfig {
    std::string base_url;
    std::string api_key;
    std::string model = "default";
    int max_concurrent = 4;
    int retry_limit = 3;
    BackendKind backend = BackendKind::Mock;
    std::string fixture_path;     // mock backend
    std::size_t embedding_dim = 64;  // mock backend
    int backoff_base_ms = 1000;   // doubles per retry, capped
    int backoff_cap_ms = 30000;
};

struct GatewayError : std::runtime_error {
    explicit GatewayError(const std::string& msg) : std::runtime_error(msg) {}
};

// Stable 64-bit FNV-1a over the concatenated "role:content\n" sequence; keys
// the mock fixture file.
std::uint64_t prompt_hash(const std::vector<ChatMessage>& messages);
std::string prompt_hash_hex(const std::vector<ChatMessage>& messages);

// Exponential backoff schedule: base * 2^attempt, capped.
int backoff_ms(int attempt, int base_ms = 1000, int cap_ms = 30000);

class Backend {
  public:
    virtual ~Backend() = default;
    virtual std::string complete(const ChatRequest& req) = 0;
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
};

// Fixture-driven deterministic backend. Chat responses come from a JSON map
// hash-hex -> text; embeddings are hash-derived unit vectors.
class MockBackend : public Backend {
  public:
    MockBackend(std::string fixture_path, std::size_t embedding_dim);
    explicit MockBackend(std::map<std::string, std::string> fixtures,
                         std::size_t embedding_dim = 64);

    std::string complete(const ChatRequest& req) override;
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

    static EmbeddingVector embedding_for(const std::string& text, std::size_t dim);

  private:
    std::map<std::string, std::string> fixtures_;
    std::size_t dim_;
};

// OpenAI-compatible HTTP backend: POST {base}/chat/completions, {base}/embeddings.
class HttpBackend : public Backend {
  public:
    explicit HttpBackend(const GatewayConfig& cfg);
    std::string complete(const ChatRequest& req) override;
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

  private:
    std::string host_;
    std::string path_prefix_;
    std::string api_key_;
};

class Gateway {
  public:
    explicit Gateway(const GatewayConfig& cfg);
    Gateway(const GatewayConfig& cfg, std::shared_ptr<Backend> backend);

    std::string chat(const ChatRequest& req);
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts);

    const GatewayConfig& config() const { return cfg_; }

    // Test hook: sleep function used between retries.
    std::function<void(int)> sleeper;

  private:
    template <typename F>
    auto with_retries(F&& call) -> decltype(call());

    GatewayConfig cfg_;
    std::shared_ptr<Backend> backend_;
    struct Semaphore;
    std::shared_ptr<Semaphore> permits_;
};

}  // namespace omx::gateway

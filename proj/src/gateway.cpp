#include "omx/gateway.hpp"

#include <chrono>
#include <condition_variable>
#include <fstream>
#include <thread>

#include "json.hpp"

// cpp-httplib is header-only; keep it out of the public header.
#include "httplib.h"

namespace omx::gateway {

using nlohmann::json;

std::string role_name(Role r) {
    switch (r) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

std::uint64_t prompt_hash(const std::vector<ChatMessage>& messages) {
    std::uint64_t h = 1469598103934665603ULL;
    auto feed = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    };
    for (const auto& m : messages) {
        feed(role_name(m.role));
        feed(":");
        feed(m.content);
        feed("\n");
    }
    return h;
}

std::string prompt_hash_hex(const std::vector<ChatMessage>& messages) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(prompt_hash(messages)));
    return buf;
}

int backoff_ms(int attempt, int base_ms, int cap_ms) {
    long long v = base_ms;
    for (int i = 0; i < attempt && v < cap_ms; ++i) v *= 2;
    return static_cast<int>(std::min<long long>(v, cap_ms));
}

// ---------------------------------------------------------------------------
// Mock backend

MockBackend::MockBackend(std::string fixture_path, std::size_t embedding_dim)
    : dim_(embedding_dim) {
    if (fixture_path.empty()) return;  // embeddings only
    std::ifstream in(fixture_path);
    if (!in.good()) throw GatewayError("cannot open fixture file: " + fixture_path);
    json j = json::parse(in);
    for (auto& [k, v] : j.items()) fixtures_[k] = v.get<std::string>();
}

MockBackend::MockBackend(std::map<std::string, std::string> fixtures,
                         std::size_t embedding_dim)
    : fixtures_(std::move(fixtures)), dim_(embedding_dim) {}

std::string MockBackend::complete(const ChatRequest& req) {
    auto key = prompt_hash_hex(req.messages);
    auto it = fixtures_.find(key);
    if (it == fixtures_.end()) throw GatewayError("no fixture for prompt hash " + key);
    return it->second;
}

EmbeddingVector MockBackend::embedding_for(const std::string& text, std::size_t dim) {
    // splitmix64 stream seeded by the FNV-1a hash of the text.
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    auto next = [&]() {
        h += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = h;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    EmbeddingVector v;
    v.values.resize(dim);
    for (auto& x : v.values)
        x = (next() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    double n = v.norm();
    for (auto& x : v.values) x /= n;
    return v;
}

std::vector<EmbeddingVector> MockBackend::embed(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embedding_for(t, dim_));
    return out;
}

// ---------------------------------------------------------------------------
// HTTP backend

namespace {

// Splits "http://host:port/v1" into host part and path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& base) {
    auto scheme_end = base.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = base.find('/', host_start);
    if (path_start == std::string::npos) return {base, ""};
    return {base.substr(0, path_start), base.substr(path_start)};
}

}  // namespace

HttpBackend::HttpBackend(const GatewayConfig& cfg) : api_key_(cfg.api_key) {
    std::tie(host_, path_prefix_) = split_base_url(cfg.base_url);
    if (host_.empty()) throw GatewayError("http backend requires base_url");
}

std::string HttpBackend::complete(const ChatRequest& req) {
    json body;
    body["model"] = req.model;
    body["temperature"] = req.temperature;
    body["max_tokens"] = req.max_tokens;
    if (req.seed) body["seed"] = *req.seed;
    body["messages"] = json::array();
    for (const auto& m : req.messages)
        body["messages"].push_back({{"role", role_name(m.role)}, {"content", m.content}});

    httplib::Client client(host_);
    client.set_read_timeout(300, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = client.Post(path_prefix_ + "/chat/completions", headers, body.dump(),
                           "application/json");
    if (!res) throw GatewayError("transport failure contacting " + host_);
    if (res->status / 100 != 2)
        throw GatewayError("chat/completions returned status " +
                           std::to_string(res->status));
    json parsed = json::parse(res->body);
    const auto& choices = parsed.at("choices");
    if (choices.empty()) throw GatewayError("empty choices in chat response");
    return choices.at(0).at("message").at("content").get<std::string>();
}

std::vector<EmbeddingVector> HttpBackend::embed(const std::vector<std::string>& texts) {
    json body;
    body["model"] = "embedding";
    body["input"] = texts;

    httplib::Client client(host_);
    client.set_read_timeout(300, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = client.Post(path_prefix_ + "/embeddings", headers, body.dump(),
                           "application/json");
    if (!res) throw GatewayError("transport failure contacting " + host_);
    if (res->status / 100 != 2)
        throw GatewayError("embeddings returned status " + std::to_string(res->status));
    json parsed = json::parse(res->body);
    std::vector<EmbeddingVector> out;
    for (const auto& item : parsed.at("data")) {
        EmbeddingVector v;
        for (const auto& x : item.at("embedding")) v.values.push_back(x.get<double>());
        out.push_back(std::move(v));
    }
    if (out.size() != texts.size())
        throw GatewayError("embedding count mismatch");
    return out;
}

// ---------------------------------------------------------------------------
// Gateway

struct Gateway::Semaphore {
    std::mutex m;
    std::condition_variable cv;
    int available;

    explicit Semaphore(int n) : available(n) {}

    void acquire() {
        std::unique_lock lock(m);
        cv.wait(lock, [&] { return available > 0; });
        --available;
    }

    void release() {
        {
            std::lock_guard lock(m);
            ++available;
        }
        cv.notify_one();
    }
};

namespace {

std::shared_ptr<Backend> make_backend(const GatewayConfig& cfg) {
    if (cfg.backend == BackendKind::Mock)
        return std::make_shared<MockBackend>(cfg.fixture_path, cfg.embedding_dim);
    return std::make_shared<HttpBackend>(cfg);
}

}  // namespace

Gateway::Gateway(const GatewayConfig& cfg) : Gateway(cfg, make_backend(cfg)) {}

Gateway::Gateway(const GatewayConfig& cfg, std::shared_ptr<Backend> backend)
    : cfg_(cfg),
      backend_(std::move(backend)),
      permits_(std::make_shared<Semaphore>(std::max(1, cfg.max_concurrent))) {
    sleeper = [](int ms) { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); };
}

template <typename F>
auto Gateway::with_retries(F&& call) -> decltype(call()) {
    permits_->acquire();
    struct Release {
        Semaphore* s;
        ~Release() { s->release(); }
    } release{permits_.get()};

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.retry_limit; ++attempt) {
        if (attempt > 0)
            sleeper(backoff_ms(attempt - 1, cfg_.backoff_base_ms, cfg_.backoff_cap_ms));
        try {
            return call();
        } catch (const GatewayError& e) {
            last_error = e.what();
            // Fixture misses are deterministic; retrying cannot help.
            if (last_error.starts_with("no fixture")) throw;
        }
    }
    throw GatewayError("exhausted " + std::to_string(cfg_.retry_limit) +
                       " retries: " + last_error);
}

std::string Gateway::chat(const ChatRequest& req) {
    if (req.messages.empty()) throw GatewayError("chat request with no messages");
    ChatRequest actual = req;
    if (actual.model.empty()) actual.model = cfg_.model;
    return with_retries([&] { return backend_->complete(actual); });
}

std::vector<EmbeddingVector> Gateway::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) throw GatewayError("embed with no texts");
    return with_retries([&] { return backend_->embed(texts); });
}

}  // namespace omx::gateway

#include <atomic>
#include <thread>

#include "doctest.h"
#include "omx/gateway.hpp"

using namespace omx;
using namespace omx::gateway;

namespace {

ChatRequest request_of(const std::string& text) {
    ChatRequest req;
    req.messages = {{Role::User, text}};
    return req;
}

GatewayConfig mock_config() {
    GatewayConfig cfg;
    cfg.backend = BackendKind::Mock;
    cfg.retry_limit = 3;
    return cfg;
}

// Scripted backend: fails `failures` times, then answers.
struct FlakyBackend : Backend {
    int failures;
    int calls = 0;
    explicit FlakyBackend(int f) : failures(f) {}
    std::string complete(const ChatRequest&) override {
        if (calls++ < failures) throw GatewayError("simulated 429");
        return "ok";
    }
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override {
        if (calls++ < failures) throw GatewayError("simulated 429");
        return std::vector<EmbeddingVector>(texts.size(), EmbeddingVector{{1.0}});
    }
};

// Counts concurrent entries into the backend.
struct CountingBackend : Backend {
    std::atomic<int> active{0};
    std::atomic<int> peak{0};
    std::string complete(const ChatRequest&) override {
        int now = ++active;
        int seen = peak.load();
        while (now > seen && !peak.compare_exchange_weak(seen, now)) {}
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
        --active;
        return "ok";
    }
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override {
        return std::vector<EmbeddingVector>(texts.size(), EmbeddingVector{{1.0}});
    }
};

struct RecordingBackend : Backend {
    ChatRequest last;
    std::string complete(const ChatRequest& req) override {
        last = req;
        return "ok";
    }
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override {
        return std::vector<EmbeddingVector>(texts.size(), EmbeddingVector{{1.0}});
    }
};

}  // namespace

TEST_CASE("prompt hash is stable and content-sensitive") {
    auto a = request_of("hello").messages;
    CHECK(prompt_hash(a) == prompt_hash(a));
    CHECK(prompt_hash_hex(a).size() == 16);

    auto b = request_of("hello!").messages;
    CHECK(prompt_hash(a) != prompt_hash(b));

    std::vector<ChatMessage> c = {{Role::System, "hello"}};
    CHECK(prompt_hash(a) != prompt_hash(c));

    // message boundaries matter
    std::vector<ChatMessage> two = {{Role::User, "ab"}, {Role::User, "c"}};
    std::vector<ChatMessage> one = {{Role::User, "abc"}};
    CHECK(prompt_hash(two) != prompt_hash(one));
}

TEST_CASE("backoff schedule doubles and caps") {
    CHECK(backoff_ms(0) == 1000);
    CHECK(backoff_ms(1) == 2000);
    CHECK(backoff_ms(2) == 4000);
    CHECK(backoff_ms(4) == 16000);
    CHECK(backoff_ms(5) == 30000);
    CHECK(backoff_ms(50) == 30000);
    CHECK(backoff_ms(3, 100, 500) == 500);
    CHECK(backoff_ms(0, 100, 500) == 100);
}

TEST_CASE("mock backend resolves fixtures by prompt hash") {
    auto req = request_of("what is the alignment?");
    MockBackend mock({{prompt_hash_hex(req.messages), "the answer"}});
    CHECK(mock.complete(req) == "the answer");

    auto miss = request_of("unseen");
    CHECK_THROWS_WITH_AS(mock.complete(miss),
                         doctest::Contains("no fixture for prompt hash"),
                         GatewayError);
}

TEST_CASE("mock embeddings are deterministic unit vectors") {
    auto v1 = MockBackend::embedding_for("Paper", 64);
    auto v2 = MockBackend::embedding_for("Paper", 64);
    auto v3 = MockBackend::embedding_for("Review", 64);
    CHECK(v1.dim() == 64);
    CHECK(v1.values == v2.values);
    CHECK(v1.values != v3.values);
    CHECK(v1.norm() == doctest::Approx(1.0).epsilon(1e-12));

    MockBackend mock(std::map<std::string, std::string>{}, 16);
    auto batch = mock.embed({"a", "b"});
    REQUIRE(batch.size() == 2);
    CHECK(batch[0].dim() == 16);
}

TEST_CASE("gateway retries transient failures with backoff") {
    auto backend = std::make_shared<FlakyBackend>(2);
    Gateway gw(mock_config(), backend);
    std::vector<int> delays;
    gw.sleeper = [&](int ms) { delays.push_back(ms); };

    CHECK(gw.chat(request_of("x")) == "ok");
    CHECK(backend->calls == 3);
    CHECK(delays == std::vector<int>{1000, 2000});
}

TEST_CASE("gateway exhausts retries and reports the last error") {
    auto cfg = mock_config();
    cfg.retry_limit = 2;
    Gateway gw(cfg, std::make_shared<FlakyBackend>(100));
    gw.sleeper = [](int) {};
    CHECK_THROWS_WITH_AS(gw.chat(request_of("x")),
                         doctest::Contains("simulated 429"), GatewayError);
}

TEST_CASE("fixture misses are not retried") {
    Gateway gw(mock_config(),
               std::make_shared<MockBackend>(std::map<std::string, std::string>{}));
    int sleeps = 0;
    gw.sleeper = [&](int) { ++sleeps; };
    CHECK_THROWS_AS(gw.chat(request_of("x")), GatewayError);
    CHECK(sleeps == 0);
}

TEST_CASE("concurrency never exceeds the configured cap") {
    auto cfg = mock_config();
    cfg.max_concurrent = 3;
    auto backend = std::make_shared<CountingBackend>();
    Gateway gw(cfg, backend);

    std::vector<std::thread> workers;
    for (int i = 0; i < 16; ++i)
        workers.emplace_back([&] { gw.chat(request_of("x")); });
    for (auto& w : workers) w.join();
    CHECK(backend->peak.load() <= 3);
    CHECK(backend->peak.load() >= 1);
}

TEST_CASE("default model is filled from config") {
    auto cfg = mock_config();
    cfg.model = "tuned-matcher";
    auto backend = std::make_shared<RecordingBackend>();
    Gateway gw(cfg, backend);
    gw.chat(request_of("x"));
    CHECK(backend->last.model == "tuned-matcher");

    ChatRequest req = request_of("y");
    req.model = "override";
    gw.chat(req);
    CHECK(backend->last.model == "override");
}

TEST_CASE("empty requests are rejected") {
    Gateway gw(mock_config(),
               std::make_shared<MockBackend>(std::map<std::string, std::string>{}));
    CHECK_THROWS_AS(gw.chat(ChatRequest{}), GatewayError);
    CHECK_THROWS_AS(gw.embed({}), GatewayError);
}

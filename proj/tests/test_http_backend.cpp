#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hot/errors.hpp"
#include "hot/http_backend.hpp"

using namespace hot;

namespace {

// One throwaway server per test, bound to a free loopback port.
struct TestServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    void start() {
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~TestServer() {
        server.stop();
        if (thread.joinable()) thread.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
};

HttpBackendConfig fast_config(const std::string& url) {
    HttpBackendConfig cfg;
    cfg.base_url = url;
    cfg.model = "test-model";
    cfg.backoff_ms = 1;  // keep retry tests fast
    return cfg;
}

}  // namespace

TEST_CASE("request carries the prompt and sampling params; reply text passes through") {
    TestServer ts;
    nlohmann::json seen;
    ts.server.Post("/v1/completions", [&](const httplib::Request& req,
                                          httplib::Response& res) {
        seen = nlohmann::json::parse(req.body);
        nlohmann::json out{{"choices",
                            {{{"text", " verbatim reply "},
                              {"finish_reason", "length"},
                              {"logprobs",
                               {{"token_logprobs", {-0.5, -0.25}}}}}}}};
        res.set_content(out.dump(), "application/json");
    });
    ts.start();

    HttpBackend backend(fast_config(ts.url()));
    GenerationParams p;
    p.temperature = 0.25;
    p.max_tokens = 32;
    p.stop_markers = {"Patient:"};
    auto c = backend.generate("Patient: hi\nDoctor:", p);

    CHECK(seen["model"] == "test-model");
    CHECK(seen["prompt"] == "Patient: hi\nDoctor:");
    CHECK(seen["temperature"].get<double>() == doctest::Approx(0.25));
    CHECK(seen["max_tokens"] == 32);
    CHECK(seen["stop"][0] == "Patient:");
    CHECK(c.text == " verbatim reply ");  // no local mutation of provider text
    CHECK(c.finish_reason == FinishReason::Length);
    REQUIRE(c.token_logprobs.has_value());
    CHECK((*c.token_logprobs)[1] == doctest::Approx(-0.25));
    CHECK(backend.id() == "http:test-model");
}

TEST_CASE("5xx and 429 are retried until a success lands") {
    TestServer ts;
    std::atomic<int> hits{0};
    ts.server.Post("/v1/completions", [&](const httplib::Request&, httplib::Response& res) {
        int n = ++hits;
        if (n == 1) {
            res.status = 500;
            return;
        }
        if (n == 2) {
            res.status = 429;
            return;
        }
        res.set_content(R"({"choices":[{"text":"ok","finish_reason":"stop"}]})",
                        "application/json");
    });
    ts.start();

    HttpBackend backend(fast_config(ts.url()));
    auto c = backend.generate("prompt", GenerationParams{});
    CHECK(c.text == "ok");
    CHECK(hits == 3);
}

TEST_CASE("persistent failure surfaces BackendUnavailable after max_retries") {
    TestServer ts;
    std::atomic<int> hits{0};
    ts.server.Post("/v1/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 503;
    });
    ts.start();

    auto cfg = fast_config(ts.url());
    cfg.max_retries = 2;
    HttpBackend backend(cfg);
    CHECK_THROWS_AS(backend.generate("prompt", GenerationParams{}), BackendUnavailable);
    CHECK(hits == 2);
}

TEST_CASE("client errors are not retried and map to typed exceptions") {
    TestServer ts;
    std::atomic<int> hits{0};
    ts.server.Post("/v1/completions", [&](const httplib::Request& req,
                                          httplib::Response& res) {
        ++hits;
        auto body = nlohmann::json::parse(req.body);
        res.status = 400;
        if (body["prompt"].get<std::string>().size() > 50)
            res.set_content(R"({"error":"maximum context length exceeded"})",
                            "application/json");
        else
            res.set_content(R"({"error":"bad request"})", "application/json");
    });
    ts.start();

    HttpBackend backend(fast_config(ts.url()));
    CHECK_THROWS_AS(backend.generate(std::string(100, 'x'), GenerationParams{}),
                    ContextOverflow);
    CHECK_THROWS_AS(backend.generate("short", GenerationParams{}), MalformedResponse);
    CHECK(hits == 2);  // one request each, no retries
}

TEST_CASE("garbage payloads raise MalformedResponse") {
    TestServer ts;
    ts.server.Post("/v1/completions", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("<html>nope</html>", "text/html");
    });
    ts.start();
    HttpBackend backend(fast_config(ts.url()));
    CHECK_THROWS_AS(backend.generate("prompt", GenerationParams{}), MalformedResponse);

    TestServer ts2;
    ts2.server.Post("/v1/completions", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"choices":[]})", "application/json");
    });
    ts2.start();
    HttpBackend backend2(fast_config(ts2.url()));
    CHECK_THROWS_AS(backend2.generate("prompt", GenerationParams{}), MalformedResponse);
}

TEST_CASE("bearer auth header comes from the configured environment variable") {
    TestServer ts;
    std::string auth;
    ts.server.Post("/v1/completions", [&](const httplib::Request& req,
                                          httplib::Response& res) {
        auth = req.get_header_value("Authorization");
        res.set_content(R"({"choices":[{"text":"ok"}]})", "application/json");
    });
    ts.start();

    ::setenv("HOT_TEST_API_KEY", "sk-test-123", 1);
    auto cfg = fast_config(ts.url());
    cfg.api_key_env = "HOT_TEST_API_KEY";
    HttpBackend backend(cfg);
    backend.generate("prompt", GenerationParams{});
    CHECK(auth == "Bearer sk-test-123");
    ::unsetenv("HOT_TEST_API_KEY");
}

TEST_CASE("local context limit rejects oversized prompts before any request") {
    auto cfg = fast_config("http://127.0.0.1:9");
    cfg.context_limit_chars = 10;
    HttpBackend backend(cfg);
    CHECK_THROWS_AS(backend.generate(std::string(11, 'a'), GenerationParams{}),
                    ContextOverflow);
}

#include "hot/http_backend.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "hot/errors.hpp"
#include "hot/util.hpp"

namespace hot {

HttpBackend::HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.base_url.empty()) throw ParseError("http backend requires base_url");
}

Completion HttpBackend::generate(const std::string& prompt, const GenerationParams& params) {
    if (prompt.empty()) throw ParseError("empty prompt");
    validate(params);
    if (cfg_.context_limit_chars > 0 &&
        static_cast<int>(prompt.size()) > cfg_.context_limit_chars)
        throw ContextOverflow("prompt exceeds configured context limit");

    nlohmann::json body{
        {"model", cfg_.model},
        {"prompt", prompt},
        {"temperature", params.temperature},
        {"max_tokens", params.max_tokens},
        {"n", 1},
    };
    if (!params.stop_markers.empty()) body["stop"] = params.stop_markers;

    httplib::Headers headers;
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    std::string last_error;
    for (int attempt = 0; attempt < cfg_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(cfg_.backoff_ms << (attempt - 1)));
        }
        httplib::Client client(cfg_.base_url);
        client.set_read_timeout(cfg_.timeout_sec, 0);
        client.set_connection_timeout(cfg_.timeout_sec, 0);

        auto res = client.Post(cfg_.path, headers, body.dump(), "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;  // retriable
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "status " + std::to_string(res->status);
            continue;  // retriable
        }
        if (res->status >= 400) {
            // Non-retriable client error; distinguish context overflow.
            if (res->body.find("context") != std::string::npos &&
                res->body.find("length") != std::string::npos)
                throw ContextOverflow("provider rejected prompt: " + res->body);
            throw MalformedResponse("provider status " + std::to_string(res->status) +
                                    ": " + res->body);
        }

        nlohmann::json j;
        try {
            j = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw MalformedResponse(std::string("unparseable provider payload: ") + e.what());
        }
        if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
            throw MalformedResponse("provider payload has no choices");

        const auto& choice = j["choices"][0];
        Completion c;
        c.text = choice.value("text", "");  // provider text, verbatim
        c.tokens = split_ws(c.text);
        c.finish_reason =
            choice.value("finish_reason", "stop") == "length" ? FinishReason::Length
                                                              : FinishReason::Stop;
        if (choice.contains("logprobs") && choice["logprobs"].is_object() &&
            choice["logprobs"].contains("token_logprobs")) {
            std::vector<double> lps;
            for (const auto& v : choice["logprobs"]["token_logprobs"])
                lps.push_back(v.is_null() ? 0.0 : v.get<double>());
            if (lps.size() == c.tokens.size()) c.token_logprobs = std::move(lps);
        }
        return c;
    }
    throw BackendUnavailable("http backend failed after " +
                             std::to_string(cfg_.max_retries) + " attempts: " + last_error);
}

}  // namespace hot

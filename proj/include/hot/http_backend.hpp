#pragma once

#include <string>

#include "hot/backend.hpp"

namespace hot {

// OpenAI-compatible completions endpoint. Endpoint/model/key come from
// config; the API key is read from the named environment variable.
struct HttpBackendConfig {
    std::string base_url;                      // e.g. "http://localhost:8080"
    std::string path = "/v1/completions";
    std::string model;
    std::string api_key_env = "OPENAI_API_KEY";
    int max_retries = 3;
    int backoff_ms = 1000;                     // doubled per attempt: 1s/2s/4s
    int timeout_sec = 120;
    int context_limit_chars = 0;               // 0 = no local limit
};

class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig cfg);

    // Forwards prompt/temperature/max_tokens/stop and returns the provider
    // text verbatim. Retries transport failures, 5xx and 429 with
    // exponential backoff; gives up with BackendUnavailable.
    Completion generate(const std::string& prompt, const GenerationParams& params) override;
    std::string id() const override { return "http:" + cfg_.model; }

    const HttpBackendConfig& config() const { return cfg_; }

private:
    HttpBackendConfig cfg_;
};

}  // namespace hot

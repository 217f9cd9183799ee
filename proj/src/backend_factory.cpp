#include "hot/backend_factory.hpp"

#include <filesystem>

#include <nlohmann/json.hpp>

#include "hot/errors.hpp"
#include "hot/http_backend.hpp"
#include "hot/markov.hpp"
#include "hot/util.hpp"

namespace hot {

namespace {

std::string resolve(const std::string& path, const std::string& base_dir) {
    if (base_dir.empty() || std::filesystem::path(path).is_absolute()) return path;
    return (std::filesystem::path(base_dir) / path).string();
}

}  // namespace

std::unique_ptr<Backend> backend_from_config(const std::string& json_text,
                                             const std::string& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("backend config: ") + e.what());
    }
    std::string kind = j.at("backend").at("kind").get<std::string>();
    if (kind == "mock") {
        auto path = j.at("mock").at("script_path").get<std::string>();
        return std::make_unique<MockBackend>(
            MockBackend::from_json_file(resolve(path, base_dir)));
    }
    if (kind == "markov") {
        auto path = j.at("markov").at("spec_path").get<std::string>();
        return std::make_unique<MarkovBackend>(
            MarkovBackend::from_json_file(resolve(path, base_dir)));
    }
    if (kind == "http") {
        const auto& h = j.at("http");
        HttpBackendConfig cfg;
        cfg.base_url = h.at("base_url").get<std::string>();
        cfg.model = h.value("model", "");
        cfg.api_key_env = h.value("api_key_env", std::string("OPENAI_API_KEY"));
        if (h.contains("path")) cfg.path = h["path"].get<std::string>();
        if (h.contains("max_retries")) cfg.max_retries = h["max_retries"].get<int>();
        if (h.contains("backoff_ms")) cfg.backoff_ms = h["backoff_ms"].get<int>();
        if (h.contains("timeout_sec")) cfg.timeout_sec = h["timeout_sec"].get<int>();
        if (h.contains("context_limit_chars"))
            cfg.context_limit_chars = h["context_limit_chars"].get<int>();
        return std::make_unique<HttpBackend>(cfg);
    }
    throw ParseError("unknown backend kind: " + kind);
}

std::unique_ptr<Backend> backend_from_config_file(const std::string& path) {
    return backend_from_config(read_file(path),
                               std::filesystem::path(path).parent_path().string());
}

}  // namespace hot

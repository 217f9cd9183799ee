#include "hot/backend.hpp"

#include <nlohmann/json.hpp>

#include "hot/errors.hpp"
#include "hot/util.hpp"

namespace hot {

void validate(const GenerationParams& p) {
    if (p.temperature < 0) throw ParseError("temperature must be >= 0");
    if (p.max_tokens < 1) throw ParseError("max_tokens must be >= 1");
}

void validate(const Completion& c) {
    if (c.token_logprobs) {
        if (c.token_logprobs->size() != c.tokens.size())
            throw MalformedResponse("token_logprobs length mismatch");
        for (double lp : *c.token_logprobs)
            if (lp > 1e-12) throw MalformedResponse("positive token logprob");
    }
}

Completion finalize_completion(std::string text, const GenerationParams& params) {
    Completion c;
    c.finish_reason = FinishReason::Stop;

    // Truncate at the earliest stop marker.
    std::size_t cut = std::string::npos;
    for (const auto& stop : params.stop_markers) {
        if (stop.empty()) continue;
        auto pos = text.find(stop);
        if (pos != std::string::npos && pos < cut) cut = pos;
    }
    if (cut != std::string::npos) text = text.substr(0, cut);

    auto tokens = split_ws(text);
    if (static_cast<int>(tokens.size()) > params.max_tokens) {
        tokens.resize(params.max_tokens);
        text = join(tokens, " ");
        c.finish_reason = FinishReason::Length;
    }
    c.text = std::move(text);
    c.tokens = std::move(tokens);
    return c;
}

MockBackend::MockBackend(std::map<std::string, std::string> script)
    : script_(std::move(script)) {}

MockBackend MockBackend::from_json_file(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("mock script " + path + ": " + e.what());
    }
    std::map<std::string, std::string> script;
    for (auto& [k, v] : j.items()) script[k] = v.get<std::string>();
    return MockBackend(std::move(script));
}

Completion MockBackend::generate(const std::string& prompt, const GenerationParams& params) {
    if (prompt.empty()) throw ParseError("empty prompt");
    validate(params);

    auto it = script_.find(prompt);
    if (it == script_.end()) {
        // longest key that is a prefix of the prompt
        const std::pair<const std::string, std::string>* best = nullptr;
        for (const auto& kv : script_) {
            if (kv.first != "*" && prompt.rfind(kv.first, 0) == 0) {
                if (!best || kv.first.size() > best->first.size()) best = &kv;
            }
        }
        if (best) return finalize_completion(best->second, params);
        auto star = script_.find("*");
        if (star != script_.end()) return finalize_completion(star->second, params);
        throw MalformedResponse("mock backend: no script entry matches prompt");
    }
    return finalize_completion(it->second, params);
}

}  // namespace hot

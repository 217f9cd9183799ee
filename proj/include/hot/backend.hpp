#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hot {

// Sampling controls for one decoding pass. Defaults are the evaluation
// protocol constants: temperature 0.5, 168 max tokens.
struct GenerationParams {
    double temperature = 0.5;
    int max_tokens = 168;
    std::uint64_t seed = 0;
    std::vector<std::string> stop_markers;

    bool operator==(const GenerationParams&) const = default;
};

enum class FinishReason { Stop, Length };

// One decoding result.
struct Completion {
    std::string text;
    std::vector<std::string> tokens;
    std::optional<std::vector<double>> token_logprobs;
    FinishReason finish_reason = FinishReason::Stop;

    bool operator==(const Completion&) const = default;
};

void validate(const GenerationParams& p);
void validate(const Completion& c);

// Uniform generation interface. Implementations must be safe for
// concurrent generate() calls; the deterministic backends derive all
// randomness from (prompt, params.seed).
class Backend {
public:
    virtual ~Backend() = default;
    virtual Completion generate(const std::string& prompt, const GenerationParams& params) = 0;
    virtual std::string id() const = 0;
};

// Scripted deterministic backend. Lookup order: exact prompt match,
// longest script key that is a prefix of the prompt, then the "*" entry.
class MockBackend : public Backend {
public:
    explicit MockBackend(std::map<std::string, std::string> script);
    static MockBackend from_json_file(const std::string& path);

    Completion generate(const std::string& prompt, const GenerationParams& params) override;
    std::string id() const override { return "mock"; }

private:
    std::map<std::string, std::string> script_;
};

// Applies stop markers and the token budget to a raw text, producing the
// Completion shape the deterministic backends share.
Completion finalize_completion(std::string text, const GenerationParams& params);

}  // namespace hot

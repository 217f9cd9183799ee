#pragma once

#include <map>
#include <string>
#include <vector>

#include "hot/backend.hpp"

namespace hot {

// Order-1 Markov chain over a small vocabulary. Serves as the exact
// likelihood oracle: every probability it reports can be brute-forced.
struct MarkovModel {
    std::vector<std::string> vocabulary;            // V <= 32
    std::vector<std::vector<double>> transition;    // V x V, row-stochastic
    std::vector<double> initial;                    // length V, stochastic

    int token_index(const std::string& token) const;  // throws UnknownToken

    static MarkovModel from_json(const std::string& json_text);
    static MarkovModel from_json_file(const std::string& path);
};

// Throws ParseError when rows do not sum to 1 within 1e-12 or entries
// are negative.
void validate(const MarkovModel& m);

// Conditional distribution over the next token given the last context
// token (or the initial vector when the context is empty).
const std::vector<double>& next_distribution(const MarkovModel& m, int state);

// Chain-rule log-likelihood of `continuation` after `context`:
// sum_i log P(token_i | previous token). Empty continuation -> 0.
double sequence_logprob(const MarkovModel& m,
                        const std::vector<std::string>& context,
                        const std::vector<std::string>& continuation);

// Exhaustive distribution over all V^length continuations of `context`.
// Throws EnumerationTooLarge when V^length > 1e6.
std::map<std::vector<std::string>, double> enumerate_sequences(
    const MarkovModel& m, const std::vector<std::string>& context, int length);

// Sampling backend over a MarkovModel. Bit-deterministic given
// (prompt, params.seed). Temperature transform: p_i^(1/T) renormalized;
// T = 0 is argmax with lowest-index tie-break.
class MarkovBackend : public Backend {
public:
    explicit MarkovBackend(MarkovModel model);
    static MarkovBackend from_json_file(const std::string& path);

    Completion generate(const std::string& prompt, const GenerationParams& params) override;
    std::string id() const override { return "markov"; }

    const MarkovModel& model() const { return model_; }

    // State the sampler starts from for this prompt: index of the last
    // prompt token that is in the vocabulary, -1 (initial vector) otherwise.
    int context_state(const std::string& prompt) const;

private:
    MarkovModel model_;
};

std::vector<double> apply_temperature(const std::vector<double>& dist, double temperature);

}  // namespace hot

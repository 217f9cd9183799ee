#include "hot/markov.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "hot/errors.hpp"
#include "hot/util.hpp"

namespace hot {

int MarkovModel::token_index(const std::string& token) const {
    auto it = std::find(vocabulary.begin(), vocabulary.end(), token);
    if (it == vocabulary.end()) throw UnknownToken("token not in vocabulary: " + token);
    return static_cast<int>(it - vocabulary.begin());
}

MarkovModel MarkovModel::from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("markov spec: ") + e.what());
    }
    MarkovModel m;
    m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
    m.transition = j.at("transition").get<std::vector<std::vector<double>>>();
    if (j.contains("initial")) {
        m.initial = j.at("initial").get<std::vector<double>>();
    } else {
        m.initial.assign(m.vocabulary.size(), 1.0 / m.vocabulary.size());
    }
    validate(m);
    return m;
}

MarkovModel MarkovModel::from_json_file(const std::string& path) {
    return from_json(read_file(path));
}

namespace {

void check_stochastic(const std::vector<double>& row, const char* what) {
    double sum = 0;
    for (double p : row) {
        if (p < 0) throw ParseError(std::string(what) + " has a negative entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ParseError(std::string(what) + " does not sum to 1");
}

}  // namespace

void validate(const MarkovModel& m) {
    const auto v = m.vocabulary.size();
    if (v == 0 || v > 32) throw ParseError("vocabulary size must be in [1, 32]");
    if (m.transition.size() != v) throw ParseError("transition matrix must be VxV");
    for (const auto& row : m.transition) {
        if (row.size() != v) throw ParseError("transition matrix must be VxV");
        check_stochastic(row, "transition row");
    }
    if (m.initial.size() != v) throw ParseError("initial vector must have length V");
    check_stochastic(m.initial, "initial vector");
}

const std::vector<double>& next_distribution(const MarkovModel& m, int state) {
    return state < 0 ? m.initial : m.transition[state];
}

double sequence_logprob(const MarkovModel& m,
                        const std::vector<std::string>& context,
                        const std::vector<std::string>& continuation) {
    int state = context.empty() ? -1 : m.token_index(context.back());
    double logp = 0.0;
    for (const auto& tok : continuation) {
        int next = m.token_index(tok);
        logp += std::log(next_distribution(m, state)[next]);
        state = next;
    }
    return logp;
}

std::map<std::vector<std::string>, double> enumerate_sequences(
    const MarkovModel& m, const std::vector<std::string>& context, int length) {
    const auto v = m.vocabulary.size();
    double total = std::pow(static_cast<double>(v), length);
    if (total > 1e6) throw EnumerationTooLarge("V^length exceeds 1e6");

    std::map<std::vector<std::string>, double> out;
    int start = context.empty() ? -1 : m.token_index(context.back());

    std::vector<int> seq(length, 0);
    // odometer enumeration over all V^length sequences; probabilities go
    // through exp(sum of logs), the same arithmetic path as
    // sequence_logprob, so the chain-rule identity holds bit-exactly
    while (true) {
        double logp = 0.0;
        int state = start;
        std::vector<std::string> tokens;
        tokens.reserve(length);
        for (int idx : seq) {
            logp += std::log(next_distribution(m, state)[idx]);
            state = idx;
            tokens.push_back(m.vocabulary[idx]);
        }
        out.emplace(std::move(tokens), std::exp(logp));
        int pos = length - 1;
        while (pos >= 0 && seq[pos] == static_cast<int>(v) - 1) seq[pos--] = 0;
        if (pos < 0) break;
        ++seq[pos];
    }
    return out;
}

std::vector<double> apply_temperature(const std::vector<double>& dist, double temperature) {
    std::vector<double> out(dist.size());
    if (temperature == 0.0) {
        // argmax, lowest index wins ties
        std::size_t best = 0;
        for (std::size_t i = 1; i < dist.size(); ++i)
            if (dist[i] > dist[best]) best = i;
        out[best] = 1.0;
        return out;
    }
    double sum = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        out[i] = dist[i] > 0 ? std::pow(dist[i], 1.0 / temperature) : 0.0;
        sum += out[i];
    }
    for (auto& p : out) p /= sum;
    return out;
}

MarkovBackend::MarkovBackend(MarkovModel model) : model_(std::move(model)) {
    validate(model_);
}

MarkovBackend MarkovBackend::from_json_file(const std::string& path) {
    return MarkovBackend(MarkovModel::from_json_file(path));
}

int MarkovBackend::context_state(const std::string& prompt) const {
    int state = -1;
    for (const auto& tok : split_ws(prompt)) {
        auto it = std::find(model_.vocabulary.begin(), model_.vocabulary.end(), tok);
        if (it != model_.vocabulary.end())
            state = static_cast<int>(it - model_.vocabulary.begin());
    }
    return state;
}

Completion MarkovBackend::generate(const std::string& prompt, const GenerationParams& params) {
    if (prompt.empty()) throw ParseError("empty prompt");
    validate(params);

    // All randomness comes from (prompt, seed); two calls with the same
    // pair are byte-identical and concurrency cannot change results.
    std::mt19937_64 rng(splitmix64(params.seed) ^ fnv1a(prompt));

    int state = context_state(prompt);
    std::vector<std::string> tokens;
    std::vector<double> logprobs;
    for (int i = 0; i < params.max_tokens; ++i) {
        auto dist = apply_temperature(next_distribution(model_, state), params.temperature);
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        double acc = 0;
        std::size_t pick = dist.size() - 1;
        for (std::size_t k = 0; k < dist.size(); ++k) {
            acc += dist[k];
            if (u < acc) {
                pick = k;
                break;
            }
        }
        tokens.push_back(model_.vocabulary[pick]);
        logprobs.push_back(std::log(next_distribution(model_, state)[pick]));
        state = static_cast<int>(pick);
    }

    Completion c = finalize_completion(join(tokens, " "), params);
    if (c.finish_reason == FinishReason::Stop && c.tokens.size() == tokens.size())
        c.finish_reason = FinishReason::Length;  // budget exhausted, no stop marker hit
    logprobs.resize(c.tokens.size());
    c.token_logprobs = std::move(logprobs);
    return c;
}

}  // namespace hot

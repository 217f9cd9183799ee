#include "hot/likelihood.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace hot {

std::string FactorizationReport::to_json_string() const {
    nlohmann::json j{
        {"log_joint", log_joint},
        {"log_d", log_d},
        {"log_f", log_f},
        {"residual", residual},
    };
    return j.dump(2);
}

double answer_logprob(const MarkovModel& model,
                      const std::vector<std::string>& context_tokens,
                      const std::vector<std::string>& d_tokens,
                      const std::vector<std::string>& f_tokens,
                      const std::vector<std::string>& a_tokens) {
    std::vector<std::string> full = context_tokens;
    full.insert(full.end(), d_tokens.begin(), d_tokens.end());
    full.insert(full.end(), f_tokens.begin(), f_tokens.end());
    return sequence_logprob(model, full, a_tokens);
}

namespace {

FactorizationReport factorization_impl(const MarkovModel& model,
                                       const std::vector<std::string>& context,
                                       int d_len, int f_len, bool chained) {
    auto p_d = enumerate_sequences(model, context, d_len);

    // Joint over (D, F). Independent semantics: two separate draws
    // conditioned on C. Chained semantics: F drawn from C+D.
    std::map<std::pair<std::vector<std::string>, std::vector<std::string>>, double> joint;
    std::map<std::vector<std::string>, double> p_f_marginal;
    for (const auto& [d_seq, pd] : p_d) {
        std::vector<std::string> f_context = context;
        if (chained) f_context.insert(f_context.end(), d_seq.begin(), d_seq.end());
        // For the independent case this re-derives P(F|C) through the
        // log-space chain rule, a different arithmetic path than the
        // enumerator used for the marginals below.
        auto f_all = enumerate_sequences(model, f_context, f_len);
        for (const auto& [f_seq, pf_cond] : f_all) {
            double pf = chained
                            ? pf_cond
                            : std::exp(sequence_logprob(model, context, f_seq));
            joint[{d_seq, f_seq}] = pd * pf;
            p_f_marginal[f_seq] += pd * pf;
        }
    }

    auto p_f = chained ? p_f_marginal : enumerate_sequences(model, context, f_len);

    FactorizationReport report;
    report.residual = -1;
    for (const auto& [pair, pj] : joint) {
        double pd = p_d.at(pair.first);
        double pf = p_f.at(pair.second);
        double res = std::abs(pj - pd * pf);
        if (res > report.residual) {
            report.residual = res;
            report.log_joint = std::log(pj);
            report.log_d = std::log(pd);
            report.log_f = std::log(pf);
        }
    }
    return report;
}

// Direct product walk over transition entries; deliberately avoids the
// log-space path so the two marginalization routes differ.
double prob_product(const MarkovModel& model, const std::vector<std::string>& context,
                    const std::vector<std::string>& continuation) {
    int state = context.empty() ? -1 : model.token_index(context.back());
    double p = 1.0;
    for (const auto& tok : continuation) {
        int next = model.token_index(tok);
        p *= next_distribution(model, state)[next];
        state = next;
    }
    return p;
}

}  // namespace

FactorizationReport check_factorization(const MarkovModel& model,
                                        const std::vector<std::string>& context_tokens,
                                        int d_len, int f_len) {
    return factorization_impl(model, context_tokens, d_len, f_len, /*chained=*/false);
}

FactorizationReport check_factorization_chained(const MarkovModel& model,
                                                const std::vector<std::string>& context_tokens,
                                                int d_len, int f_len) {
    return factorization_impl(model, context_tokens, d_len, f_len, /*chained=*/true);
}

double marginal_answer_prob_factorized(const MarkovModel& model,
                                       const std::vector<std::string>& context,
                                       int d_len, int f_len,
                                       const std::vector<std::string>& a_tokens) {
    auto p_d = enumerate_sequences(model, context, d_len);
    auto p_f = enumerate_sequences(model, context, f_len);
    double total = 0;
    for (const auto& [d_seq, pd] : p_d) {
        double log_d = sequence_logprob(model, context, d_seq);
        for (const auto& [f_seq, pf] : p_f) {
            double log_f = sequence_logprob(model, context, f_seq);
            double log_a = answer_logprob(model, context, d_seq, f_seq, a_tokens);
            total += std::exp(log_d + log_f + log_a);
        }
    }
    return total;
}

double marginal_answer_prob_enumerated(const MarkovModel& model,
                                       const std::vector<std::string>& context,
                                       int d_len, int f_len,
                                       const std::vector<std::string>& a_tokens) {
    auto p_d = enumerate_sequences(model, context, d_len);
    auto p_f = enumerate_sequences(model, context, f_len);
    double total = 0;
    for (const auto& [d_seq, pd] : p_d) {
        for (const auto& [f_seq, pf] : p_f) {
            std::vector<std::string> full = context;
            full.insert(full.end(), d_seq.begin(), d_seq.end());
            full.insert(full.end(), f_seq.begin(), f_seq.end());
            total += pd * pf * prob_product(model, full, a_tokens);
        }
    }
    return total;
}

}  // namespace hot

#pragma once

#include <string>
#include <vector>

#include "hot/markov.hpp"

namespace hot {

// Numerical check that the factorized objective is exact under the
// pipeline's sampling semantics. The abstract independence statement is
// instantiated with the diffused draw D and focused draw F as the two
// events and the dialogue context C as the conditioning event.
struct FactorizationReport {
    double log_joint = 0;  // log P(D,F|C) at the worst pair
    double log_d = 0;      // log P(D|C)
    double log_f = 0;      // log P(F|C)
    double residual = 0;   // max over pairs of |P(D,F|C) - P(D|C)P(F|C)|

    std::string to_json_string() const;
};

// log P(A | C,D,F): chain rule over the concatenated context.
double answer_logprob(const MarkovModel& model,
                      const std::vector<std::string>& context_tokens,
                      const std::vector<std::string>& d_tokens,
                      const std::vector<std::string>& f_tokens,
                      const std::vector<std::string>& a_tokens);

// P(D,F|C) under independent sampling (two draws conditioned only on C)
// compared against P(D|C)*P(F|C) for every pair. Residual is exactly 0
// up to float association error.
FactorizationReport check_factorization(const MarkovModel& model,
                                        const std::vector<std::string>& context_tokens,
                                        int d_len, int f_len);

// Adversarial variant: F is drawn from the chained context C+D, so the
// independence assumption is violated and the residual is positive.
FactorizationReport check_factorization_chained(const MarkovModel& model,
                                                const std::vector<std::string>& context_tokens,
                                                int d_len, int f_len);

// Marginal P(A|C) under the full generative process, computed two ways:
// a log-space factorized sum per (D,F) pair, and a probability-map route
// built from the enumerator. Both marginalize sum_{D,F} P(A|C,D,F)
// P(D|C) P(F|C).
double marginal_answer_prob_factorized(const MarkovModel& model,
                                       const std::vector<std::string>& context_tokens,
                                       int d_len, int f_len,
                                       const std::vector<std::string>& a_tokens);
double marginal_answer_prob_enumerated(const MarkovModel& model,
                                       const std::vector<std::string>& context_tokens,
                                       int d_len, int f_len,
                                       const std::vector<std::string>& a_tokens);

}  // namespace hot

#include "metric_oracle.hpp"

#include <cmath>

#include "hot/stemmer.hpp"

namespace oracle {

namespace {

using Gram = std::vector<std::string>;

std::vector<Gram> grams_of(const std::vector<std::string>& tokens, int k) {
    std::vector<Gram> out;
    for (std::size_t i = 0; i + k <= tokens.size(); ++i)
        out.emplace_back(tokens.begin() + i, tokens.begin() + i + k);
    return out;
}

int count_of(const std::vector<Gram>& grams, const Gram& g) {
    int n = 0;
    for (const auto& x : grams)
        if (x == g) ++n;
    return n;
}

}  // namespace

double bleu(const std::vector<std::string>& hyp, const std::vector<std::string>& ref, int n) {
    if (hyp.empty() || ref.empty()) return 0;
    double prod = 1;
    for (int k = 1; k <= n; ++k) {
        auto hg = grams_of(hyp, k);
        auto rg = grams_of(ref, k);
        if (hg.empty()) return 0;
        std::vector<bool> used(rg.size(), false);
        int matched = 0;
        for (const auto& g : hg) {
            for (std::size_t j = 0; j < rg.size(); ++j) {
                if (!used[j] && rg[j] == g) {
                    used[j] = true;
                    ++matched;
                    break;
                }
            }
        }
        if (matched == 0) return 0;
        prod *= static_cast<double>(matched) / hg.size();
    }
    double bp = hyp.size() < ref.size()
                    ? std::exp(1.0 - static_cast<double>(ref.size()) / hyp.size())
                    : 1.0;
    return bp * std::pow(prod, 1.0 / n);
}

double nist(const std::vector<std::string>& hyp, const std::vector<std::string>& ref, int n) {
    if (hyp.empty() || ref.empty()) return 0;
    double score = 0;
    for (int k = 1; k <= n; ++k) {
        auto hg = grams_of(hyp, k);
        auto rg = grams_of(ref, k);
        if (hg.empty()) continue;
        auto rg_prev = k > 1 ? grams_of(ref, k - 1) : std::vector<Gram>{};
        std::vector<bool> used(rg.size(), false);
        double info_sum = 0;
        for (const auto& g : hg) {
            for (std::size_t j = 0; j < rg.size(); ++j) {
                if (!used[j] && rg[j] == g) {
                    used[j] = true;
                    if (k == 1) {
                        info_sum += std::log2(static_cast<double>(ref.size()) / count_of(rg, g));
                    } else {
                        Gram prefix(g.begin(), g.end() - 1);
                        info_sum += std::log2(static_cast<double>(count_of(rg_prev, prefix)) /
                                              count_of(rg, g));
                    }
                    break;
                }
            }
        }
        score += info_sum / hg.size();
    }
    double beta = std::log(0.5) / std::pow(std::log(2.0 / 3.0), 2);
    double ratio = static_cast<double>(hyp.size()) / ref.size();
    if (ratio > 1) ratio = 1;
    return score * std::exp(beta * std::pow(std::log(ratio), 2));
}

double meteor(const std::vector<std::string>& hyp, const std::vector<std::string>& ref) {
    if (hyp.empty() || ref.empty()) return 0;
    std::vector<int> align(hyp.size(), -1);
    std::vector<bool> taken(ref.size(), false);

    // stage 1: surface forms; stage 2: Porter stems
    for (int stage = 0; stage < 2; ++stage) {
        for (std::size_t i = 0; i < hyp.size(); ++i) {
            if (align[i] >= 0) continue;
            for (std::size_t j = 0; j < ref.size(); ++j) {
                if (taken[j]) continue;
                bool equal = stage == 0 ? hyp[i] == ref[j]
                                        : hot::porter_stem(hyp[i]) == hot::porter_stem(ref[j]);
                if (equal) {
                    align[i] = static_cast<int>(j);
                    taken[j] = true;
                    break;
                }
            }
        }
    }

    int m = 0, chunks = 0, prev = -2;
    for (std::size_t i = 0; i < hyp.size(); ++i) {
        if (align[i] < 0) continue;
        ++m;
        if (align[i] != prev + 1) ++chunks;
        prev = align[i];
    }
    if (m == 0) return 0;
    double p = static_cast<double>(m) / hyp.size();
    double r = static_cast<double>(m) / ref.size();
    double fmean = p * r / (0.9 * p + 0.1 * r);
    return fmean * (1.0 - 0.5 * std::pow(static_cast<double>(chunks) / m, 3));
}

}  // namespace oracle

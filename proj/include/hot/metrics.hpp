#pragma once

#include <string>
#include <vector>

namespace hot {

enum class LangMode { Whitespace, CJKChar };

LangMode lang_mode_from_string(const std::string& s);  // "whitespace" | "cjk-char"
std::string lang_mode_name(LangMode m);

// Whitespace mode: lowercase, split on Unicode whitespace, leading and
// trailing ASCII punctuation become separate tokens. CJKChar mode: every
// CJK codepoint is its own token, contiguous Latin/digit runs stay whole.
std::vector<std::string> tokenize(const std::string& text, LangMode mode);

struct TokenizedPair {
    std::vector<std::string> hypothesis;
    std::vector<std::string> reference;
    LangMode lang_mode = LangMode::Whitespace;
};

TokenizedPair make_pair(const std::string& hyp, const std::string& ref, LangMode mode);

struct MetricVector {
    double bleu2 = 0;
    double bleu4 = 0;
    double meteor = 0;
    double nist2 = 0;
    double nist4 = 0;

    bool operator==(const MetricVector&) const = default;
};

// BLEU-n: geometric mean of clipped modified k-gram precisions, uniform
// weights, brevity penalty min(1, e^{1-r/h}); no smoothing, so a zero
// precision zeroes the score.
double bleu_n(const TokenizedPair& pair, int n);

// NIST-n: information-weighted n-gram matches with the NIST brevity
// factor; info weights come from the single reference.
double nist_n(const TokenizedPair& pair, int n);

// METEOR variant: exact then stem matcher stages, fewest-chunks greedy
// alignment, Fmean = PR/(0.9P+0.1R), penalty 0.5*(chunks/m)^3.
double meteor(const TokenizedPair& pair);

struct PairScore {
    MetricVector metrics;
    bool empty_hypothesis = false;
};

// Tokenizes once and computes all five metrics. Throws EmptyReference.
PairScore score_pair(const std::string& hyp_text, const std::string& ref_text, LangMode mode);

MetricVector mean_metrics(const std::vector<MetricVector>& rows);

}  // namespace hot

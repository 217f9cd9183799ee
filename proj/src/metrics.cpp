#include "hot/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>

#include "hot/errors.hpp"
#include "hot/stemmer.hpp"

namespace hot {

LangMode lang_mode_from_string(const std::string& s) {
    if (s == "whitespace") return LangMode::Whitespace;
    if (s == "cjk-char") return LangMode::CJKChar;
    throw UsageError("unknown lang mode: " + s);
}

std::string lang_mode_name(LangMode m) {
    return m == LangMode::Whitespace ? "whitespace" : "cjk-char";
}

namespace {

struct Codepoint {
    std::uint32_t value;
    std::string bytes;
};

std::vector<Codepoint> decode_utf8(const std::string& text) {
    std::vector<Codepoint> out;
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = text[i];
        std::size_t len = 1;
        std::uint32_t cp = c;
        if (c >= 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else if (c >= 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if (c >= 0xC0) {
            len = 2;
            cp = c & 0x1F;
        }
        if (i + len > text.size()) len = 1, cp = c;
        for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (text[i + k] & 0x3F);
        out.push_back({cp, text.substr(i, len)});
        i += len;
    }
    return out;
}

bool is_space_cp(std::uint32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == 0x00A0 ||
           cp == 0x3000;
}

bool is_ascii_punct(std::uint32_t cp) {
    return cp < 128 && std::ispunct(static_cast<int>(cp));
}

bool is_cjk(std::uint32_t cp) {
    return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
           (cp >= 0xF900 && cp <= 0xFAFF);
}

// CJK-range punctuation and full-width forms
bool is_wide_punct(std::uint32_t cp) {
    return (cp >= 0x3001 && cp <= 0x303F) || (cp >= 0xFF00 && cp <= 0xFFEF);
}

std::string lower_ascii(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c += 'a' - 'A';
    return s;
}

// Split leading/trailing ASCII punctuation runs off a whitespace token.
void emit_with_punct(const std::string& word, std::vector<std::string>& out) {
    std::size_t b = 0, e = word.size();
    std::vector<std::string> leading;
    while (b < e && is_ascii_punct(static_cast<unsigned char>(word[b])))
        leading.push_back(std::string(1, word[b++]));
    std::vector<std::string> trailing;
    while (e > b && is_ascii_punct(static_cast<unsigned char>(word[e - 1])))
        trailing.insert(trailing.begin(), std::string(1, word[--e + 0]));
    for (auto& p : leading) out.push_back(p);
    if (e > b) out.push_back(word.substr(b, e - b));
    for (auto& p : trailing) out.push_back(p);
}

std::vector<std::string> tokenize_whitespace(const std::string& text) {
    std::vector<std::string> out;
    auto cps = decode_utf8(lower_ascii(text));
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) emit_with_punct(cur, out), cur.clear();
    };
    for (const auto& cp : cps) {
        if (is_space_cp(cp.value))
            flush();
        else
            cur += cp.bytes;
    }
    flush();
    return out;
}

std::vector<std::string> tokenize_cjk(const std::string& text) {
    std::vector<std::string> out;
    auto cps = decode_utf8(lower_ascii(text));
    std::string run;
    auto flush = [&] {
        if (!run.empty()) out.push_back(run), run.clear();
    };
    for (const auto& cp : cps) {
        if (is_space_cp(cp.value)) {
            flush();
        } else if (is_cjk(cp.value) || is_wide_punct(cp.value)) {
            flush();
            out.push_back(cp.bytes);
        } else if (is_ascii_punct(cp.value)) {
            flush();
            out.push_back(cp.bytes);
        } else {
            run += cp.bytes;
        }
    }
    flush();
    return out;
}

using Counts = std::map<std::string, int>;

std::string gram_key(const std::vector<std::string>& tokens, std::size_t pos, int k) {
    std::string key;
    for (int i = 0; i < k; ++i) {
        if (i) key += '\x1f';
        key += tokens[pos + i];
    }
    return key;
}

Counts ngram_counts(const std::vector<std::string>& tokens, int k) {
    Counts counts;
    if (static_cast<int>(tokens.size()) < k) return counts;
    for (std::size_t i = 0; i + k <= tokens.size(); ++i) ++counts[gram_key(tokens, i, k)];
    return counts;
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text, LangMode mode) {
    return mode == LangMode::Whitespace ? tokenize_whitespace(text) : tokenize_cjk(text);
}

TokenizedPair make_pair(const std::string& hyp, const std::string& ref, LangMode mode) {
    TokenizedPair p;
    p.hypothesis = tokenize(hyp, mode);
    p.reference = tokenize(ref, mode);
    p.lang_mode = mode;
    if (p.reference.empty()) throw EmptyReference("reference tokenizes to nothing");
    return p;
}

double bleu_n(const TokenizedPair& pair, int n) {
    const auto h = static_cast<double>(pair.hypothesis.size());
    const auto r = static_cast<double>(pair.reference.size());
    if (h == 0) return 0;

    double log_sum = 0;
    for (int k = 1; k <= n; ++k) {
        auto hyp_counts = ngram_counts(pair.hypothesis, k);
        auto ref_counts = ngram_counts(pair.reference, k);
        int total = 0, clipped = 0;
        for (const auto& [gram, count] : hyp_counts) {
            total += count;
            auto it = ref_counts.find(gram);
            if (it != ref_counts.end()) clipped += std::min(count, it->second);
        }
        if (total == 0 || clipped == 0) return 0;  // no smoothing
        log_sum += std::log(static_cast<double>(clipped) / total) / n;
    }
    double bp = std::min(1.0, std::exp(1.0 - r / h));
    return bp * std::exp(log_sum);
}

double nist_n(const TokenizedPair& pair, int n) {
    const auto h = static_cast<double>(pair.hypothesis.size());
    const auto r = static_cast<double>(pair.reference.size());
    if (h == 0) return 0;

    // reference n-gram statistics per order, for the info weights
    std::vector<Counts> ref_counts(n + 1);
    for (int k = 1; k <= n; ++k) ref_counts[k] = ngram_counts(pair.reference, k);

    auto info = [&](const std::string& gram, int k) {
        if (k == 1) {
            return std::log2(r / ref_counts[1].at(gram));
        }
        auto cut = gram.rfind('\x1f');
        const std::string prefix = gram.substr(0, cut);
        return std::log2(static_cast<double>(ref_counts[k - 1].at(prefix)) /
                         ref_counts[k].at(gram));
    };

    double score = 0;
    for (int k = 1; k <= n; ++k) {
        auto hyp_counts = ngram_counts(pair.hypothesis, k);
        int denom = static_cast<int>(pair.hypothesis.size()) - k + 1;
        if (denom <= 0) continue;
        double matched_info = 0;
        for (const auto& [gram, count] : hyp_counts) {
            auto it = ref_counts[k].find(gram);
            if (it == ref_counts[k].end()) continue;
            matched_info += std::min(count, it->second) * info(gram, k);
        }
        score += matched_info / denom;
    }

    // brevity factor: 0.5 at h/r = 2/3
    static const double beta = std::log(0.5) / std::pow(std::log(2.0 / 3.0), 2);
    double ratio = std::min(h / r, 1.0);
    double factor = std::exp(beta * std::pow(std::log(ratio), 2));
    return score * factor;
}

double meteor(const TokenizedPair& pair) {
    const auto h = pair.hypothesis.size();
    const auto r = pair.reference.size();
    if (h == 0 || r == 0) return 0;

    std::vector<int> hyp_match(h, -1);
    std::vector<bool> ref_used(r, false);

    auto match_stage = [&](auto&& key) {
        for (std::size_t i = 0; i < h; ++i) {
            if (hyp_match[i] >= 0) continue;
            for (std::size_t j = 0; j < r; ++j) {
                if (ref_used[j]) continue;
                if (key(pair.hypothesis[i]) == key(pair.reference[j])) {
                    hyp_match[i] = static_cast<int>(j);
                    ref_used[j] = true;
                    break;
                }
            }
        }
    };
    match_stage([](const std::string& t) { return t; });
    match_stage([](const std::string& t) { return porter_stem(t); });

    int m = 0;
    int chunks = 0;
    int prev_j = -2;
    for (std::size_t i = 0; i < h; ++i) {
        if (hyp_match[i] < 0) continue;
        ++m;
        if (hyp_match[i] != prev_j + 1) ++chunks;
        prev_j = hyp_match[i];
    }
    if (m == 0) return 0;

    double precision = static_cast<double>(m) / h;
    double recall = static_cast<double>(m) / r;
    double fmean = precision * recall / (0.9 * precision + 0.1 * recall);
    double penalty = 0.5 * std::pow(static_cast<double>(chunks) / m, 3);
    return fmean * (1.0 - penalty);
}

PairScore score_pair(const std::string& hyp_text, const std::string& ref_text,
                     LangMode mode) {
    TokenizedPair pair = make_pair(hyp_text, ref_text, mode);
    PairScore out;
    if (pair.hypothesis.empty()) {
        out.empty_hypothesis = true;
        return out;
    }
    out.metrics.bleu2 = bleu_n(pair, 2);
    out.metrics.bleu4 = bleu_n(pair, 4);
    out.metrics.meteor = meteor(pair);
    out.metrics.nist2 = nist_n(pair, 2);
    out.metrics.nist4 = nist_n(pair, 4);
    return out;
}

MetricVector mean_metrics(const std::vector<MetricVector>& rows) {
    MetricVector mean;
    if (rows.empty()) return mean;
    for (const auto& v : rows) {
        mean.bleu2 += v.bleu2;
        mean.bleu4 += v.bleu4;
        mean.meteor += v.meteor;
        mean.nist2 += v.nist2;
        mean.nist4 += v.nist4;
    }
    auto n = static_cast<double>(rows.size());
    mean.bleu2 /= n;
    mean.bleu4 /= n;
    mean.meteor /= n;
    mean.nist2 /= n;
    mean.nist4 /= n;
    return mean;
}

}  // namespace hot

#include "hot/stemmer.hpp"

#include <algorithm>

// Classic Porter (1980) algorithm, steps 1a through 5b.

namespace hot {

namespace {

bool is_ascii_alpha(const std::string& s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

bool is_consonant(const std::string& w, int i) {
    char c = w[i];
    if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') return false;
    if (c == 'y') return i == 0 ? true : !is_consonant(w, i - 1);
    return true;
}

// number of consonant-vowel sequences ("measure") of w[0..end]
int measure(const std::string& w, int end) {
    int n = 0;
    int i = 0;
    while (i <= end && is_consonant(w, i)) ++i;
    while (i <= end) {
        while (i <= end && !is_consonant(w, i)) ++i;
        if (i > end) break;
        ++n;
        while (i <= end && is_consonant(w, i)) ++i;
    }
    return n;
}

bool has_vowel(const std::string& w, int end) {
    for (int i = 0; i <= end; ++i)
        if (!is_consonant(w, i)) return true;
    return false;
}

bool double_consonant(const std::string& w) {
    auto n = w.size();
    return n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, static_cast<int>(n) - 1);
}

// consonant-vowel-consonant ending, last consonant not w/x/y
bool cvc(const std::string& w) {
    auto n = static_cast<int>(w.size());
    if (n < 3) return false;
    if (!is_consonant(w, n - 1) || is_consonant(w, n - 2) || !is_consonant(w, n - 3))
        return false;
    char c = w[n - 1];
    return c != 'w' && c != 'x' && c != 'y';
}

bool ends_with(const std::string& w, const std::string& suffix) {
    return w.size() >= suffix.size() &&
           w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// stem length (index of last char) once `suffix` is removed
int stem_end(const std::string& w, const std::string& suffix) {
    return static_cast<int>(w.size() - suffix.size()) - 1;
}

bool replace_if_measure(std::string& w, const std::string& suffix, const std::string& repl,
                        int min_measure) {
    if (!ends_with(w, suffix)) return false;
    if (measure(w, stem_end(w, suffix)) > min_measure - 1) {
        w = w.substr(0, w.size() - suffix.size()) + repl;
        return true;
    }
    return true;  // suffix matched, rule consumed, no change
}

void step1a(std::string& w) {
    if (ends_with(w, "sses"))
        w = w.substr(0, w.size() - 2);
    else if (ends_with(w, "ies"))
        w = w.substr(0, w.size() - 2);
    else if (ends_with(w, "ss")) {
    } else if (ends_with(w, "s"))
        w = w.substr(0, w.size() - 1);
}

void step1b(std::string& w) {
    bool cleanup = false;
    if (ends_with(w, "eed")) {
        if (measure(w, stem_end(w, "eed")) > 0) w = w.substr(0, w.size() - 1);
    } else if (ends_with(w, "ed") && has_vowel(w, stem_end(w, "ed"))) {
        w = w.substr(0, w.size() - 2);
        cleanup = true;
    } else if (ends_with(w, "ing") && has_vowel(w, stem_end(w, "ing"))) {
        w = w.substr(0, w.size() - 3);
        cleanup = true;
    }
    if (cleanup) {
        if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
            w += 'e';
        } else if (double_consonant(w)) {
            char c = w.back();
            if (c != 'l' && c != 's' && c != 'z') w.pop_back();
        } else if (measure(w, static_cast<int>(w.size()) - 1) == 1 && cvc(w)) {
            w += 'e';
        }
    }
}

void step1c(std::string& w) {
    if (ends_with(w, "y") && has_vowel(w, static_cast<int>(w.size()) - 2))
        w.back() = 'i';
}

void step2(std::string& w) {
    static const std::pair<const char*, const char*> rules[] = {
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
        {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},   {"entli", "ent"},
        {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
        {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},  {"biliti", "ble"},
    };
    for (const auto& [suf, repl] : rules) {
        if (ends_with(w, suf)) {
            replace_if_measure(w, suf, repl, 1);
            return;
        }
    }
}

void step3(std::string& w) {
    static const std::pair<const char*, const char*> rules[] = {
        {"icate", "ic"}, {"ative", ""},  {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},    {"ness", ""},
    };
    for (const auto& [suf, repl] : rules) {
        if (ends_with(w, suf)) {
            replace_if_measure(w, suf, repl, 1);
            return;
        }
    }
}

void step4(std::string& w) {
    static const char* suffixes[] = {
        "al",  "ance", "ence", "er",   "ic",   "able", "ible", "ant", "ement",
        "ment", "ent", "ion",  "ou",   "ism",  "ate",  "iti",  "ous", "ive", "ize",
    };
    for (const char* suf : suffixes) {
        if (ends_with(w, suf)) {
            int end = stem_end(w, suf);
            if (std::string(suf) == "ion" && end >= 0 && w[end] != 's' && w[end] != 't')
                return;
            if (measure(w, end) > 1) w = w.substr(0, end + 1);
            return;
        }
    }
}

void step5a(std::string& w) {
    if (ends_with(w, "e")) {
        int end = static_cast<int>(w.size()) - 2;
        int m = measure(w, end);
        if (m > 1 || (m == 1 && !cvc(w.substr(0, w.size() - 1)))) w.pop_back();
    }
}

void step5b(std::string& w) {
    if (ends_with(w, "ll") && measure(w, static_cast<int>(w.size()) - 1) > 1) w.pop_back();
}

}  // namespace

std::string porter_stem(const std::string& token) {
    if (!is_ascii_alpha(token) || token.size() <= 2) return token;
    std::string w = token;
    step1a(w);
    step1b(w);
    step1c(w);
    step2(w);
    step3(w);
    step4(w);
    step5a(w);
    step5b(w);
    return w;
}

}  // namespace hot

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hot/dialogue.hpp"

namespace hot {

enum class Split { Train, Test };
enum class Lang { En, Zh };

std::string split_name(Split s);
Split split_from_name(const std::string& s);
std::string lang_name(Lang l);
Lang lang_from_name(const std::string& s);

struct CorpusSample {
    std::string id;
    DialogueHistory dialogue;
    std::string reference;  // gold doctor reply
    Split split = Split::Test;
    Lang lang = Lang::En;

    bool operator==(const CorpusSample&) const = default;
};

// Canonical record, one JSON object per line:
//   {"id","lang","split","dialogue":[{"role","text"}],"description"?,"reference"}
std::vector<CorpusSample> load_corpus(const std::string& path,
                                      const std::string& format = "canonical-jsonl");
std::vector<CorpusSample> parse_corpus(const std::string& jsonl,
                                       const std::string& format = "canonical-jsonl");
std::string serialize_corpus(const std::vector<CorpusSample>& samples);
void save_corpus(const std::vector<CorpusSample>& samples, const std::string& path);

enum class PiiCategory { Name, Address, Contact };

std::string placeholder_for(PiiCategory c);  // <NAME> / <ADDRESS> / <CONTACT>

struct AnonymizationRule {
    PiiCategory category = PiiCategory::Name;
    std::string pattern;  // ECMAScript regex
    std::string name;     // rule id for reporting
};

// Bundled rule set: email regex, international phone regex,
// honorific + capitalized-name heuristic, address keyword/gazetteer
// pattern.
std::vector<AnonymizationRule> default_anonymization_rules();
std::vector<AnonymizationRule> rules_from_json_file(const std::string& path);

struct AnonymizationResult {
    std::string text;
    std::map<PiiCategory, int> substitutions;
};

// Every match replaced by its category placeholder; replacements are
// non-overlapping, longest-match-first, left-to-right; idempotent on
// already-anonymized text.
AnonymizationResult anonymize(const std::string& text,
                              const std::vector<AnonymizationRule>& rules);

// Seeded uniform sample of k train exemplars without replacement, each
// rendered as transcript + "Doctor: <reference>", separated by blank
// lines. Throws InsufficientTrainData.
std::string build_fewshot_prompt(const std::vector<CorpusSample>& train, int k,
                                 std::uint64_t seed,
                                 const MarkerTable& markers = MarkerTable{});

// The ids build_fewshot_prompt would select, for leakage auditing.
std::vector<std::string> fewshot_selection(const std::vector<CorpusSample>& train, int k,
                                           std::uint64_t seed);

}  // namespace hot

#include "hot/corpus.hpp"

#include <algorithm>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hot/errors.hpp"
#include "hot/util.hpp"

namespace hot {

std::string split_name(Split s) { return s == Split::Train ? "train" : "test"; }

Split split_from_name(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "test") return Split::Test;
    throw ParseError("unknown split: " + s);
}

std::string lang_name(Lang l) { return l == Lang::En ? "en" : "zh"; }

Lang lang_from_name(const std::string& s) {
    if (s == "en") return Lang::En;
    if (s == "zh") return Lang::Zh;
    throw ParseError("unknown lang: " + s);
}

namespace {

std::string flatten_newlines(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return trim(s);
}

Role role_from_label(std::string label) {
    for (char& c : label)
        if (c >= 'A' && c <= 'Z') c += 'a' - 'A';
    label = trim(label);
    if (label == "patient" || label == "患者") return Role::Patient;
    if (label == "doctor" || label == "医生") return Role::Doctor;
    throw ParseError("unknown role label: " + label);
}

CorpusSample parse_canonical(const nlohmann::json& j, int lineno) {
    CorpusSample s;
    s.id = j.at("id").get<std::string>();
    s.lang = lang_from_name(j.value("lang", "en"));
    s.split = split_from_name(j.value("split", "test"));
    if (j.contains("description"))
        s.dialogue.description = flatten_newlines(j["description"].get<std::string>());
    for (const auto& t : j.at("dialogue")) {
        s.dialogue.turns.push_back({role_from_label(t.at("role").get<std::string>()),
                                    flatten_newlines(t.at("text").get<std::string>())});
    }
    s.dialogue.sample_id = s.id;
    s.reference = flatten_newlines(j.at("reference").get<std::string>());
    if (s.reference.empty())
        throw ParseError("line " + std::to_string(lineno) + ": empty reference");
    validate(s.dialogue);
    return s;
}

// "patient: ..." / "doctor: ..." utterance lists; the last doctor
// utterance becomes the reference.
CorpusSample parse_utterance_list(const nlohmann::json& j, int lineno, Lang lang) {
    CorpusSample s;
    s.lang = lang;
    s.id = j.value("id", "line-" + std::to_string(lineno));
    if (j.contains("description"))
        s.dialogue.description = flatten_newlines(j["description"].get<std::string>());

    std::vector<Turn> turns;
    for (const auto& u : j.at("utterances")) {
        auto text = u.get<std::string>();
        auto colon = text.find(':');
        if (colon == std::string::npos)
            throw ParseError("line " + std::to_string(lineno) + ": utterance has no role");
        turns.push_back({role_from_label(text.substr(0, colon)),
                         flatten_newlines(text.substr(colon + 1))});
    }
    // last doctor turn is the gold reply
    auto last_doctor = std::find_if(turns.rbegin(), turns.rend(), [](const Turn& t) {
        return t.role == Role::Doctor;
    });
    if (last_doctor == turns.rend())
        throw ParseError("line " + std::to_string(lineno) + ": no doctor reply");
    s.reference = last_doctor->text;
    turns.erase(std::next(last_doctor).base());
    if (turns.empty())
        throw ParseError("line " + std::to_string(lineno) + ": no context turns");
    s.dialogue.turns = std::move(turns);
    s.dialogue.sample_id = s.id;
    s.split = split_from_name(j.value("split", "test"));
    if (s.reference.empty())
        throw ParseError("line " + std::to_string(lineno) + ": empty reference");
    validate(s.dialogue);
    return s;
}

// single-round question/answer records
CorpusSample parse_cmdd_like(const nlohmann::json& j, int lineno) {
    CorpusSample s;
    s.lang = Lang::Zh;
    s.id = j.value("id", "line-" + std::to_string(lineno));
    if (j.contains("description"))
        s.dialogue.description = flatten_newlines(j["description"].get<std::string>());
    s.dialogue.turns.push_back(
        {Role::Patient, flatten_newlines(j.at("question").get<std::string>())});
    s.dialogue.sample_id = s.id;
    s.reference = flatten_newlines(j.at("answer").get<std::string>());
    s.split = split_from_name(j.value("split", "test"));
    if (s.reference.empty())
        throw ParseError("line " + std::to_string(lineno) + ": empty reference");
    validate(s.dialogue);
    return s;
}

}  // namespace

std::vector<CorpusSample> parse_corpus(const std::string& jsonl, const std::string& format) {
    std::vector<CorpusSample> samples;
    std::set<std::string> seen;
    std::istringstream in(jsonl);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
        CorpusSample s;
        try {
            if (format == "canonical-jsonl")
                s = parse_canonical(j, lineno);
            else if (format == "meddialog-like")
                s = parse_utterance_list(j, lineno, Lang::En);
            else if (format == "covid-like")
                s = parse_utterance_list(j, lineno, Lang::En);
            else if (format == "cmdd-like")
                s = parse_cmdd_like(j, lineno);
            else
                throw UsageError("unknown corpus format: " + format);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!seen.insert(s.id).second) throw DuplicateId("duplicate sample id: " + s.id);
        samples.push_back(std::move(s));
    }
    return samples;
}

std::vector<CorpusSample> load_corpus(const std::string& path, const std::string& format) {
    return parse_corpus(read_file(path), format);
}

std::string serialize_corpus(const std::vector<CorpusSample>& samples) {
    std::ostringstream out;
    for (const auto& s : samples) {
        nlohmann::json j;
        j["id"] = s.id;
        j["lang"] = lang_name(s.lang);
        j["split"] = split_name(s.split);
        if (s.dialogue.description) j["description"] = *s.dialogue.description;
        auto dialogue = nlohmann::json::array();
        for (const auto& t : s.dialogue.turns)
            dialogue.push_back({{"role", t.role == Role::Patient ? "patient" : "doctor"},
                                {"text", t.text}});
        j["dialogue"] = std::move(dialogue);
        j["reference"] = s.reference;
        out << j.dump() << '\n';
    }
    return out.str();
}

void save_corpus(const std::vector<CorpusSample>& samples, const std::string& path) {
    write_file(path, serialize_corpus(samples));
}

std::string placeholder_for(PiiCategory c) {
    switch (c) {
        case PiiCategory::Name: return "<NAME>";
        case PiiCategory::Address: return "<ADDRESS>";
        case PiiCategory::Contact: return "<CONTACT>";
    }
    return "<NAME>";
}

std::vector<AnonymizationRule> default_anonymization_rules() {
    return {
        {PiiCategory::Contact, R"([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})", "email"},
        {PiiCategory::Contact, R"(\+?[0-9][0-9 ()./-]{7,}[0-9])", "phone"},
        {PiiCategory::Name,
         R"((Dr|Mr|Mrs|Ms|Prof|Professor)\.?\s+[A-Z][a-z]+(\s+[A-Z][a-z]+)*)",
         "honorific-name"},
        {PiiCategory::Address,
         R"([0-9]+\s+[A-Z][a-z]+\s+(Street|St|Road|Rd|Avenue|Ave|Lane|Drive|Blvd)\b\.?)",
         "street-address"},
        {PiiCategory::Address,
         R"(\b(Cape Town|Johannesburg|Gauteng|Pretoria|New York|Los Angeles|London|Sydney|)"
         R"(Beijing|Shanghai|Wuhan|Hunan|Springfield)\b)",
         "place-gazetteer"},
    };
}

std::vector<AnonymizationRule> rules_from_json_file(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("rules file: ") + e.what());
    }
    std::vector<AnonymizationRule> rules;
    for (const auto& r : j) {
        AnonymizationRule rule;
        auto cat = r.at("category").get<std::string>();
        if (cat == "name")
            rule.category = PiiCategory::Name;
        else if (cat == "address")
            rule.category = PiiCategory::Address;
        else if (cat == "contact")
            rule.category = PiiCategory::Contact;
        else
            throw ParseError("unknown rule category: " + cat);
        rule.pattern = r.at("pattern").get<std::string>();
        rule.name = r.value("name", cat);
        rules.push_back(std::move(rule));
    }
    if (rules.empty()) throw ParseError("empty rules file");
    return rules;
}

AnonymizationResult anonymize(const std::string& text,
                              const std::vector<AnonymizationRule>& rules) {
    if (rules.empty()) throw UsageError("anonymize requires at least one rule");

    struct Match {
        std::size_t pos;
        std::size_t len;
        PiiCategory category;
    };
    std::vector<Match> matches;
    for (const auto& rule : rules) {
        std::regex re(rule.pattern);
        for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
             it != std::sregex_iterator(); ++it) {
            if (it->length(0) == 0) continue;
            matches.push_back({static_cast<std::size_t>(it->position(0)),
                               static_cast<std::size_t>(it->length(0)), rule.category});
        }
    }
    // left-to-right, longest match wins at equal position
    std::sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) {
        return a.pos != b.pos ? a.pos < b.pos : a.len > b.len;
    });
    std::vector<Match> accepted;
    std::size_t cursor = 0;
    for (const auto& m : matches) {
        if (m.pos < cursor) continue;  // overlaps an accepted match
        accepted.push_back(m);
        cursor = m.pos + m.len;
    }

    AnonymizationResult result;
    result.text = text;
    for (auto it = accepted.rbegin(); it != accepted.rend(); ++it) {
        result.text.replace(it->pos, it->len, placeholder_for(it->category));
        ++result.substitutions[it->category];
    }
    return result;
}

std::vector<std::string> fewshot_selection(const std::vector<CorpusSample>& train, int k,
                                           std::uint64_t seed) {
    if (k < 0) throw UsageError("fewshot k must be >= 0");
    if (static_cast<int>(train.size()) < k)
        throw InsufficientTrainData("need " + std::to_string(k) + " train samples, have " +
                                    std::to_string(train.size()));
    std::vector<std::size_t> indices(train.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    std::mt19937_64 rng(splitmix64(seed));
    // partial Fisher-Yates: first k entries are the selection. Modulo
    // draw keeps the choice identical across standard libraries.
    for (int i = 0; i < k; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng() % (indices.size() - i));
        std::swap(indices[i], indices[j]);
    }
    std::vector<std::string> ids;
    for (int i = 0; i < k; ++i) ids.push_back(train[indices[i]].id);
    return ids;
}

std::string build_fewshot_prompt(const std::vector<CorpusSample>& train, int k,
                                 std::uint64_t seed, const MarkerTable& markers) {
    auto ids = fewshot_selection(train, k, seed);
    std::ostringstream out;
    bool first = true;
    for (const auto& id : ids) {
        auto it = std::find_if(train.begin(), train.end(),
                               [&](const CorpusSample& s) { return s.id == id; });
        if (!first) out << "\n\n";
        out << render_dialogue(it->dialogue, markers) << '\n'
            << markers.doctor << ' ' << it->reference;
        first = false;
    }
    return out.str();
}

}  // namespace hot

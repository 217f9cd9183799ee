#include "hot/dialogue.hpp"

#include <algorithm>
#include <sstream>

#include "hot/errors.hpp"

namespace hot {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string role_name(Role r) {
    return r == Role::Patient ? "Patient" : "Doctor";
}

MarkerTable markers_en() { return MarkerTable{}; }

MarkerTable markers_zh() {
    MarkerTable m;
    m.patient = "患者：";
    m.doctor = "医生：";
    m.description = "患者描述：";
    return m;
}

bool MedicalRecordSchema::contains(const std::string& item) const {
    return std::find(items.begin(), items.end(), item) != items.end();
}

MedicalRecordSchema default_record_schema() {
    return MedicalRecordSchema{{
        "Chief Complaint",
        "Current Medical History",
        "Auxiliary Examination",
        "Past History",
        "Diagnosis",
        "Suggestion",
    }};
}

bool FocusedSummary::all_empty() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const RecordEntry& e) { return e.empty || trim(e.text).empty(); });
}

void validate(const DialogueHistory& h) {
    if (h.turns.empty()) throw ParseError("dialogue has no turns: " + h.sample_id);
    for (const auto& t : h.turns) {
        if (trim(t.text).empty())
            throw ParseError("dialogue turn is empty after trimming: " + h.sample_id);
    }
}

void validate(const MedicalRecordSchema& s) {
    for (std::size_t i = 0; i < s.items.size(); ++i) {
        if (trim(s.items[i]).empty()) throw ParseError("empty record item name");
        for (std::size_t j = i + 1; j < s.items.size(); ++j) {
            if (s.items[i] == s.items[j])
                throw ParseError("duplicate record item name: " + s.items[i]);
        }
    }
}

std::string render_dialogue(const DialogueHistory& h, const MarkerTable& markers) {
    std::ostringstream out;
    bool first = true;
    if (h.description) {
        out << markers.description << ' ' << *h.description;
        first = false;
    }
    for (const auto& t : h.turns) {
        if (!first) out << '\n';
        out << (t.role == Role::Patient ? markers.patient : markers.doctor) << ' ' << t.text;
        first = false;
    }
    return out.str();
}

DialogueHistory parse_dialogue(const std::string& text, const MarkerTable& markers) {
    DialogueHistory h;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto starts = [&](const std::string& marker) {
            return line.rfind(marker, 0) == 0;
        };
        auto rest = [&](const std::string& marker) {
            return trim(line.substr(marker.size()));
        };
        if (starts(markers.description)) {
            h.description = rest(markers.description);
        } else if (starts(markers.patient)) {
            h.turns.push_back({Role::Patient, rest(markers.patient)});
        } else if (starts(markers.doctor)) {
            h.turns.push_back({Role::Doctor, rest(markers.doctor)});
        } else {
            throw ParseError("transcript line " + std::to_string(lineno) +
                             " has no role marker: " + line);
        }
    }
    validate(h);
    return h;
}

}  // namespace hot

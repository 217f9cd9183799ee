#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hot {

enum class Role { Patient, Doctor };

std::string role_name(Role r);

// One utterance in a dialogue.
struct Turn {
    Role role = Role::Patient;
    std::string text;

    bool operator==(const Turn&) const = default;
};

// The conditioning context: an ordered patient/doctor transcript plus an
// optional free-text description preamble.
struct DialogueHistory {
    std::string sample_id;
    std::optional<std::string> description;
    std::vector<Turn> turns;

    bool operator==(const DialogueHistory&) const = default;
};

// Role markers used when rendering transcripts and when filtering raw
// backend output. Marker choice is explicit config, not a heuristic.
struct MarkerTable {
    std::string patient = "Patient:";
    std::string doctor = "Doctor:";
    std::string description = "Patient Description:";

    std::vector<std::string> all() const { return {patient, doctor, description}; }
};

MarkerTable markers_en();
MarkerTable markers_zh();  // 患者 / 医生

// One diffused-thinking sample: the filtered text plus the raw output it
// was projected from.
struct ThoughtContent {
    int index = 1;  // 1-based slot
    std::string text;
    std::string raw;

    bool operator==(const ThoughtContent&) const = default;
};

struct DiffusedThoughts {
    std::vector<ThoughtContent> items;

    bool empty() const { return items.empty(); }
    std::size_t size() const { return items.size(); }
    bool operator==(const DiffusedThoughts&) const = default;
};

// Ordered record-item names the focused stage fills in.
struct MedicalRecordSchema {
    std::vector<std::string> items;

    bool contains(const std::string& item) const;
    bool operator==(const MedicalRecordSchema&) const = default;
};

// Chief Complaint, Current Medical History, Auxiliary Examination,
// Past History, Diagnosis, Suggestion.
MedicalRecordSchema default_record_schema();

struct RecordEntry {
    std::string item;
    std::string text;
    bool empty = false;  // backend produced nothing for this item

    bool operator==(const RecordEntry&) const = default;
};

struct FocusedSummary {
    std::vector<RecordEntry> entries;

    bool all_empty() const;
    std::size_t size() const { return entries.size(); }
    bool operator==(const FocusedSummary&) const = default;
};

struct Response {
    std::string text;
    std::string raw;
    int token_count = 0;

    bool operator==(const Response&) const = default;
};

// Throws ParseError when a type invariant is violated.
void validate(const DialogueHistory& h);
void validate(const MedicalRecordSchema& s);

// Canonical transcript serialization:
//   "Patient Description: <d>\n" (if present) then one "<Role>: <text>"
//   line per turn.
std::string render_dialogue(const DialogueHistory& h,
                            const MarkerTable& markers = MarkerTable{});

// Inverse of render_dialogue for fixture round-trips. Throws ParseError.
DialogueHistory parse_dialogue(const std::string& text,
                               const MarkerTable& markers = MarkerTable{});

}  // namespace hot

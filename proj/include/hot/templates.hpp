#pragma once

#include <string>
#include <vector>

#include "hot/dialogue.hpp"

namespace hot {

// Sections of the fused response-generation prompt. The terminal
// "Doctor:" trigger is always last and is not part of the order.
enum class FusionSection { Transcript, Thoughts, Record };

using FusionOrder = std::vector<FusionSection>;

FusionOrder default_fusion_order();  // transcript, thoughts, record
FusionOrder fusion_order_from_string(const std::string& spec);  // "transcript,thoughts,record"
std::string fusion_order_to_string(const FusionOrder& order);

// All prompt text in one place, versioned so reports can record which
// catalog produced a run.
struct TemplateCatalog {
    std::string version = "1";
    std::string lang = "en";
    MarkerTable markers;

    // Diffused-thinking trigger templates #1..#8 (index 0 is #1).
    std::vector<std::string> diffused_templates;
    std::string cot_trigger;               // "Let's think step by step"
    std::string cot_answer_suffix;         // "Therefore, the doctor's reply is:"
    std::string focused_question_pattern;  // "What is the {item}?"
    std::string focused_frame;             // framing line before the question
    std::string thoughts_label;            // "Possible thoughts:"
    std::string record_label;              // "Medical record:"

    const std::string& diffused_template(int template_id) const;  // throws UnknownTemplate

    std::string to_json() const;
    static TemplateCatalog from_json(const std::string& json_text);
    static TemplateCatalog from_json_file(const std::string& path);
};

TemplateCatalog default_catalog_en();
TemplateCatalog default_catalog_zh();
TemplateCatalog default_catalog(const std::string& lang);  // "en" or "zh"

// transcript + newline + selected trigger template.
std::string build_diffused_prompt(const TemplateCatalog& cat, const DialogueHistory& history,
                                  int template_id = 1);

// transcript + framing line + "What is the <item>?". Throws UnknownItem
// when the item is not in the schema.
std::string build_focused_prompt(const TemplateCatalog& cat, const DialogueHistory& history,
                                 const std::string& item, const MedicalRecordSchema& schema);

// Whole-record variant for single-call focused thinking: lists all item
// headers so the completion can be parsed back by header matching.
std::string build_focused_record_prompt(const TemplateCatalog& cat,
                                        const DialogueHistory& history,
                                        const MedicalRecordSchema& schema);

// Deterministic fused frame: labeled sections in `order`, terminal
// "Doctor:" trigger. Throws EmptyThoughts / EmptySummary.
std::string fuse_prompt(const TemplateCatalog& cat, const DialogueHistory& history,
                        const DiffusedThoughts& thoughts, const FocusedSummary& summary,
                        const FusionOrder& order = default_fusion_order());

// Fusion frame with optional sections, used by the single-strategy
// pipeline variants. No emptiness checks.
std::string fuse_sections(const TemplateCatalog& cat, const DialogueHistory& history,
                          const DiffusedThoughts* thoughts, const FocusedSummary* summary,
                          const FusionOrder& order);

struct CotPrompts {
    std::string stage1;
    std::string answer_suffix;

    // stage1 + the stage-1 reasoning + the answer-extraction suffix.
    std::string stage2(const std::string& reasoning) const;
};

CotPrompts build_cot_prompts(const TemplateCatalog& cat, const DialogueHistory& history);

}  // namespace hot

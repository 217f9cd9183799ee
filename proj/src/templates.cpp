#include "hot/templates.hpp"

#include <sstream>

#include <nlohmann/json.hpp>

#include "hot/errors.hpp"
#include "hot/util.hpp"

namespace hot {

FusionOrder default_fusion_order() {
    return {FusionSection::Transcript, FusionSection::Thoughts, FusionSection::Record};
}

FusionOrder fusion_order_from_string(const std::string& spec) {
    FusionOrder order;
    std::istringstream in(spec);
    std::string part;
    while (std::getline(in, part, ',')) {
        part = trim(part);
        if (part == "transcript")
            order.push_back(FusionSection::Transcript);
        else if (part == "thoughts")
            order.push_back(FusionSection::Thoughts);
        else if (part == "record")
            order.push_back(FusionSection::Record);
        else
            throw ParseError("unknown fusion section: " + part);
    }
    if (order.empty()) throw ParseError("empty fusion order");
    return order;
}

std::string fusion_order_to_string(const FusionOrder& order) {
    std::vector<std::string> parts;
    for (auto s : order) {
        switch (s) {
            case FusionSection::Transcript: parts.push_back("transcript"); break;
            case FusionSection::Thoughts: parts.push_back("thoughts"); break;
            case FusionSection::Record: parts.push_back("record"); break;
        }
    }
    return join(parts, ",");
}

const std::string& TemplateCatalog::diffused_template(int template_id) const {
    if (template_id < 1 || template_id > static_cast<int>(diffused_templates.size()))
        throw UnknownTemplate("template id out of catalog: " + std::to_string(template_id));
    return diffused_templates[template_id - 1];
}

TemplateCatalog default_catalog_en() {
    TemplateCatalog c;
    c.version = "1";
    c.lang = "en";
    c.markers = markers_en();
    c.diffused_templates = {
        "Doctor:",
        "Doctor may think:",
        "Doctor: Let's think step by step,",
        "Let's reason like a medical expert:",
        "Given the medical nature of the question, Doctor:",
        "Doctor: Let's review your medical history and examine your symptoms.",
        "Doctor: Let's work together to rule out any serious conditions. My initial thoughts are",
        "Doctor: Let's go through the process of elimination to determine the possible causes. "
        "My hypothesis is",
    };
    c.cot_trigger = "Let's think step by step";
    c.cot_answer_suffix = "Therefore, the doctor's reply is:";
    c.focused_question_pattern = "What is the {item}?";
    c.focused_frame = "Medical record:";
    c.thoughts_label = "Possible thoughts:";
    c.record_label = "Medical record:";
    return c;
}

TemplateCatalog default_catalog_zh() {
    TemplateCatalog c;
    c.version = "1";
    c.lang = "zh";
    c.markers = markers_zh();
    c.diffused_templates = {
        "医生：",
        "医生可能认为：",
        "医生：让我们一步一步思考，",
        "让我们像医学专家一样推理：",
        "考虑到问题的医学性质，医生：",
        "医生：让我们回顾您的病史并检查您的症状。",
        "医生：让我们一起排除任何严重的疾病。我的初步想法是",
        "医生：让我们通过排除法确定可能的病因。我的假设是",
    };
    c.cot_trigger = "让我们一步一步思考";
    c.cot_answer_suffix = "因此，医生的回复是：";
    c.focused_question_pattern = "{item}是什么？";
    c.focused_frame = "病历：";
    c.thoughts_label = "可能的想法：";
    c.record_label = "病历：";
    return c;
}

TemplateCatalog default_catalog(const std::string& lang) {
    if (lang == "zh") return default_catalog_zh();
    if (lang == "en") return default_catalog_en();
    throw ParseError("unknown catalog language: " + lang);
}

std::string TemplateCatalog::to_json() const {
    nlohmann::json j{
        {"version", version},
        {"lang", lang},
        {"markers",
         {{"patient", markers.patient},
          {"doctor", markers.doctor},
          {"description", markers.description}}},
        {"diffused_templates", diffused_templates},
        {"cot_trigger", cot_trigger},
        {"cot_answer_suffix", cot_answer_suffix},
        {"focused_question_pattern", focused_question_pattern},
        {"focused_frame", focused_frame},
        {"thoughts_label", thoughts_label},
        {"record_label", record_label},
    };
    return j.dump(2);
}

TemplateCatalog TemplateCatalog::from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("template catalog: ") + e.what());
    }
    TemplateCatalog c;
    c.version = j.at("version").get<std::string>();
    c.lang = j.value("lang", "en");
    if (j.contains("markers")) {
        c.markers.patient = j["markers"].value("patient", c.markers.patient);
        c.markers.doctor = j["markers"].value("doctor", c.markers.doctor);
        c.markers.description = j["markers"].value("description", c.markers.description);
    }
    c.diffused_templates = j.at("diffused_templates").get<std::vector<std::string>>();
    c.cot_trigger = j.at("cot_trigger").get<std::string>();
    c.cot_answer_suffix = j.at("cot_answer_suffix").get<std::string>();
    c.focused_question_pattern = j.at("focused_question_pattern").get<std::string>();
    c.focused_frame = j.at("focused_frame").get<std::string>();
    c.thoughts_label = j.at("thoughts_label").get<std::string>();
    c.record_label = j.at("record_label").get<std::string>();
    if (c.diffused_templates.empty()) throw ParseError("catalog has no diffused templates");
    return c;
}

TemplateCatalog TemplateCatalog::from_json_file(const std::string& path) {
    return from_json(read_file(path));
}

std::string build_diffused_prompt(const TemplateCatalog& cat, const DialogueHistory& history,
                                  int template_id) {
    return render_dialogue(history, cat.markers) + "\n" + cat.diffused_template(template_id);
}

namespace {

std::string substitute_item(const std::string& pattern, const std::string& item) {
    std::string out = pattern;
    auto pos = out.find("{item}");
    if (pos == std::string::npos) throw ParseError("focused question pattern lacks {item}");
    out.replace(pos, 6, item);
    return out;
}

}  // namespace

std::string build_focused_prompt(const TemplateCatalog& cat, const DialogueHistory& history,
                                 const std::string& item, const MedicalRecordSchema& schema) {
    if (!schema.contains(item)) throw UnknownItem("item not in record schema: " + item);
    return render_dialogue(history, cat.markers) + "\n" + cat.focused_frame + "\n" +
           substitute_item(cat.focused_question_pattern, item);
}

std::string build_focused_record_prompt(const TemplateCatalog& cat,
                                        const DialogueHistory& history,
                                        const MedicalRecordSchema& schema) {
    validate(schema);
    std::ostringstream out;
    out << render_dialogue(history, cat.markers) << "\n"
        << cat.focused_frame << " (" << join(schema.items, ", ") << ")";
    return out.str();
}

std::string fuse_sections(const TemplateCatalog& cat, const DialogueHistory& history,
                          const DiffusedThoughts* thoughts, const FocusedSummary* summary,
                          const FusionOrder& order) {
    std::ostringstream out;
    for (auto section : order) {
        switch (section) {
            case FusionSection::Transcript:
                out << render_dialogue(history, cat.markers) << "\n";
                break;
            case FusionSection::Thoughts:
                if (!thoughts) break;
                out << cat.thoughts_label << "\n";
                for (const auto& t : thoughts->items)
                    out << t.index << ". " << t.text << "\n";
                break;
            case FusionSection::Record:
                if (!summary) break;
                out << cat.record_label << "\n";
                for (const auto& e : summary->entries)
                    out << e.item << ": " << e.text << "\n";
                break;
        }
    }
    out << cat.markers.doctor;
    return out.str();
}

std::string fuse_prompt(const TemplateCatalog& cat, const DialogueHistory& history,
                        const DiffusedThoughts& thoughts, const FocusedSummary& summary,
                        const FusionOrder& order) {
    if (thoughts.empty()) throw EmptyThoughts("no diffused thoughts to fuse");
    if (summary.entries.empty() || summary.all_empty())
        throw EmptySummary("focused summary has no content");
    return fuse_sections(cat, history, &thoughts, &summary, order);
}

std::string CotPrompts::stage2(const std::string& reasoning) const {
    return stage1 + " " + reasoning + "\n" + answer_suffix;
}

CotPrompts build_cot_prompts(const TemplateCatalog& cat, const DialogueHistory& history) {
    CotPrompts p;
    p.stage1 = render_dialogue(history, cat.markers) + "\n" + cat.markers.doctor + " " +
               cat.cot_trigger + ",";
    p.answer_suffix = cat.cot_answer_suffix;
    return p;
}

}  // namespace hot

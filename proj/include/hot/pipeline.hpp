#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hot/backend.hpp"
#include "hot/dialogue.hpp"
#include "hot/templates.hpp"

namespace hot {

enum class Method { Direct, CoT, DiffusedOnly, FocusedOnly, HoT };

std::string method_name(Method m);
Method method_from_name(const std::string& name);  // throws UsageError
std::vector<Method> all_methods();

enum class FocusedMode { SingleCall, PerItem };
enum class FilterPolicy { Truncate, Discard };

struct HotConfig {
    int d_count = 3;
    FocusedMode focused_mode = FocusedMode::SingleCall;
    GenerationParams params;
    int template_id = 1;
    FusionOrder fusion_order = default_fusion_order();
    MedicalRecordSchema schema = default_record_schema();
    FilterPolicy filter_policy = FilterPolicy::Truncate;
    std::string fewshot_prefix;  // prepended to every stage prompt when non-empty
};

void validate(const HotConfig& cfg);

struct StageRecord {
    std::string stage;  // "diffused[1]", "focused", "cot-reason", "fuse", ...
    std::string prompt;
    Completion completion;

    bool operator==(const StageRecord&) const = default;
};

// Full audit record of one method run: every prompt/completion pair plus
// the derived artifacts and the call/token budget.
struct HotTrace {
    Method method = Method::Direct;
    std::vector<StageRecord> prompts;
    std::optional<DiffusedThoughts> thoughts;
    std::optional<FocusedSummary> summary;
    Response response;
    int calls = 0;
    int generated_tokens = 0;
    double wall_time_ms = 0;

    std::string to_json_string() const;
    static HotTrace from_json_string(const std::string& json_text);
};

struct FilterResult {
    std::string text;
    bool truncated = false;  // a marker cut the raw output short
};

// Truncates raw output at the first role/stop marker, after stripping a
// leading doctor-marker echo and surrounding whitespace.
FilterResult answer_format_filter_ex(const std::string& raw,
                                     const std::vector<std::string>& markers);
std::string answer_format_filter(const std::string& raw, const MarkerTable& markers);

class Pipeline {
public:
    Pipeline(Backend& backend, TemplateCatalog catalog, HotConfig cfg);

    DiffusedThoughts diffused_thinking(const DialogueHistory& history, HotTrace* trace = nullptr);
    FocusedSummary focused_thinking(const DialogueHistory& history, HotTrace* trace = nullptr);
    Response generate_response(const DialogueHistory& history, const DiffusedThoughts& thoughts,
                               const FocusedSummary& summary, HotTrace* trace = nullptr);

    HotTrace run_method(const DialogueHistory& history, Method method);

    const HotConfig& config() const { return cfg_; }
    const TemplateCatalog& catalog() const { return catalog_; }

private:
    std::string with_prefix(const std::string& prompt) const;
    Completion call(const std::string& stage, const std::string& prompt, std::uint64_t seed,
                    HotTrace* trace);
    FilterResult filter(const std::string& raw) const;
    FocusedSummary parse_record_completion(const std::string& text) const;

    Backend& backend_;
    TemplateCatalog catalog_;
    HotConfig cfg_;
};

}  // namespace hot

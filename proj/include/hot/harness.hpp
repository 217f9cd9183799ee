#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hot/backend.hpp"
#include "hot/corpus.hpp"
#include "hot/metrics.hpp"
#include "hot/pipeline.hpp"

namespace hot {

struct ExperimentConfig {
    std::string corpus_path;
    std::string corpus_format = "canonical-jsonl";
    std::vector<Method> methods = {Method::Direct, Method::HoT};
    HotConfig hot;
    int repetitions = 3;
    std::uint64_t seed = 0;
    std::optional<LangMode> lang_mode;  // unset: chosen per sample language
    int fewshot_k = 0;                  // 0 or 5
    std::string catalog_path;           // empty: bundled catalogs
    std::string out_dir;

    std::string to_json_string() const;
    static ExperimentConfig from_json_string(const std::string& json_text);
    std::string hash() const;  // reproducible over the resolved config
};

void validate(const ExperimentConfig& cfg);

struct RowRecord {
    std::string id;
    std::string label;  // aggregate key: "hot", "hot@t3", "hot@d4", ...
    Method method = Method::Direct;
    int rep = 1;
    int template_id = 1;
    int d_count = 3;
    std::uint64_t seed = 0;
    std::string response;
    MetricVector metrics;
    int calls = 0;
    int tokens = 0;
    bool failed = false;
    std::string error;

    bool operator==(const RowRecord&) const = default;
};

struct AggregateRow {
    std::string label;
    Method method = Method::Direct;
    int template_id = 1;
    int d_count = 3;
    MetricVector metrics;  // arithmetic mean over covered rows
    MetricVector stddev;   // across-rep/sample spread, JSON output only
    double calls_mean = 0;
    double tokens_mean = 0;
    int rows_covered = 0;
    int rows_failed = 0;
    std::vector<std::string> best_in;  // metric columns this row maximizes

    bool operator==(const AggregateRow&) const = default;
};

struct BudgetPoint {
    int d_count = 0;        // 0 for the Direct/CoT anchor points
    std::string label;
    double calls_mean = 0;
    double tokens_mean = 0;
    MetricVector metrics;

    bool operator==(const BudgetPoint&) const = default;
};

struct ExperimentReport {
    std::vector<RowRecord> rows;
    std::vector<AggregateRow> aggregates;
    std::vector<BudgetPoint> budget_points;
    std::map<int, std::string> template_strings;  // sweep runs record them verbatim
    std::string config_hash;
    std::string catalog_version;
    std::string backend_id;
    std::string provenance_note;

    bool operator==(const ExperimentReport&) const = default;
};

std::string row_to_json_line(const RowRecord& row);
RowRecord row_from_json_line(const std::string& line);

std::string report_to_csv(const ExperimentReport& report);
std::string report_to_markdown(const ExperimentReport& report);
std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& json_text);

// Orchestrates method x corpus x repetition runs against one backend.
// Rows execute in a deterministic order; per-row seeds are
// base ^ hash(id, label, rep). A populated rows.jsonl in the out
// directory resumes: completed (label, id, rep) triples are skipped.
class Harness {
public:
    Harness(Backend& backend, ExperimentConfig cfg);

    ExperimentReport run();
    ExperimentReport ablation_matrix();
    ExperimentReport template_sweep();
    ExperimentReport budget_sweep(const std::vector<int>& d_values);

    // Few-shot exemplar ids chosen for this run (train split only).
    const std::vector<std::string>& fewshot_ids() const { return fewshot_ids_; }

private:
    struct Variant {
        std::string label;
        Method method;
        int template_id;
        int d_count;
    };

    ExperimentReport execute(const std::vector<Variant>& variants);
    RowRecord run_row(const CorpusSample& sample, const Variant& v, int rep);

    Backend& backend_;
    ExperimentConfig cfg_;
    TemplateCatalog catalog_en_;
    TemplateCatalog catalog_zh_;
    std::vector<CorpusSample> eval_samples_;
    std::vector<std::string> fewshot_ids_;
    std::string fewshot_prefix_en_;
    std::string fewshot_prefix_zh_;
};

// Writes config.json (resolved config + hash + timestamp), rows.jsonl
// and report.{csv,md,json} under out_dir.
void write_run_dir(const ExperimentReport& report, const ExperimentConfig& cfg);

}  // namespace hot

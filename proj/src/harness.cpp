#include "hot/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hot/errors.hpp"
#include "hot/util.hpp"

namespace hot {

namespace {

const char* kPaperModels[] = {"http:code-davinci-001", "http:code-davinci-002",
                              "http:glm-130b"};

std::string provenance_note_for(const std::string& backend_id) {
    for (const char* m : kPaperModels)
        if (backend_id == m) return "";
    return "Provenance: generated with backend '" + backend_id +
           "'. The original evaluation used code-davinci-001/002 and GLM-130B "
           "checkpoints that are no longer served; absolute scores are not "
           "comparable across backends.";
}

nlohmann::json metrics_to_json(const MetricVector& m) {
    return {{"bleu2", m.bleu2}, {"bleu4", m.bleu4}, {"meteor", m.meteor},
            {"nist2", m.nist2}, {"nist4", m.nist4}};
}

MetricVector metrics_from_json(const nlohmann::json& j) {
    MetricVector m;
    m.bleu2 = j.at("bleu2").get<double>();
    m.bleu4 = j.at("bleu4").get<double>();
    m.meteor = j.at("meteor").get<double>();
    m.nist2 = j.at("nist2").get<double>();
    m.nist4 = j.at("nist4").get<double>();
    return m;
}

std::string focused_mode_name(FocusedMode m) {
    return m == FocusedMode::SingleCall ? "single-call" : "per-item";
}

FocusedMode focused_mode_from_name(const std::string& s) {
    if (s == "single-call") return FocusedMode::SingleCall;
    if (s == "per-item") return FocusedMode::PerItem;
    throw UsageError("unknown focused mode: " + s);
}

}  // namespace

std::string ExperimentConfig::to_json_string() const {
    std::vector<std::string> method_names;
    for (Method m : methods) method_names.push_back(method_name(m));
    nlohmann::json j{
        {"corpus_path", corpus_path},
        {"corpus_format", corpus_format},
        {"methods", method_names},
        {"hot",
         {{"d_count", hot.d_count},
          {"focused_mode", focused_mode_name(hot.focused_mode)},
          {"template_id", hot.template_id},
          {"fusion_order", fusion_order_to_string(hot.fusion_order)},
          {"schema", hot.schema.items},
          {"filter_policy",
           hot.filter_policy == FilterPolicy::Truncate ? "truncate" : "discard"},
          {"temperature", hot.params.temperature},
          {"max_tokens", hot.params.max_tokens}}},
        {"repetitions", repetitions},
        {"seed", seed},
        {"fewshot_k", fewshot_k},
        {"catalog_path", catalog_path},
        {"out_dir", out_dir},
    };
    if (lang_mode) j["lang_mode"] = lang_mode_name(*lang_mode);
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json_string(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("experiment config: ") + e.what());
    }
    ExperimentConfig cfg;
    cfg.corpus_path = j.value("corpus_path", "");
    cfg.corpus_format = j.value("corpus_format", "canonical-jsonl");
    if (j.contains("methods")) {
        cfg.methods.clear();
        for (const auto& m : j["methods"])
            cfg.methods.push_back(method_from_name(m.get<std::string>()));
    }
    if (j.contains("hot")) {
        const auto& h = j["hot"];
        cfg.hot.d_count = h.value("d_count", cfg.hot.d_count);
        if (h.contains("focused_mode"))
            cfg.hot.focused_mode = focused_mode_from_name(h["focused_mode"].get<std::string>());
        cfg.hot.template_id = h.value("template_id", cfg.hot.template_id);
        if (h.contains("fusion_order"))
            cfg.hot.fusion_order =
                fusion_order_from_string(h["fusion_order"].get<std::string>());
        if (h.contains("schema"))
            cfg.hot.schema.items = h["schema"].get<std::vector<std::string>>();
        if (h.contains("filter_policy"))
            cfg.hot.filter_policy = h["filter_policy"].get<std::string>() == "discard"
                                        ? FilterPolicy::Discard
                                        : FilterPolicy::Truncate;
        cfg.hot.params.temperature = h.value("temperature", cfg.hot.params.temperature);
        cfg.hot.params.max_tokens = h.value("max_tokens", cfg.hot.params.max_tokens);
    }
    cfg.repetitions = j.value("repetitions", 3);
    cfg.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("lang_mode"))
        cfg.lang_mode = lang_mode_from_string(j["lang_mode"].get<std::string>());
    cfg.fewshot_k = j.value("fewshot_k", 0);
    cfg.catalog_path = j.value("catalog_path", "");
    cfg.out_dir = j.value("out_dir", "");
    return cfg;
}

std::string ExperimentConfig::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(to_json_string())));
    return buf;
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.repetitions < 1) throw UsageError("repetitions must be >= 1");
    if (cfg.methods.empty()) throw UsageError("no methods selected");
    if (cfg.fewshot_k != 0 && cfg.fewshot_k != 5)
        throw UsageError("fewshot_k must be 0 or 5");
    validate(cfg.hot);
}

std::string row_to_json_line(const RowRecord& row) {
    nlohmann::json j{
        {"id", row.id},
        {"label", row.label},
        {"method", method_name(row.method)},
        {"rep", row.rep},
        {"template_id", row.template_id},
        {"d", row.d_count},
        {"seed", row.seed},
        {"response", row.response},
        {"metrics", metrics_to_json(row.metrics)},
        {"calls", row.calls},
        {"tokens", row.tokens},
        {"failed", row.failed},
    };
    if (row.failed) j["error"] = row.error;
    return j.dump();
}

RowRecord row_from_json_line(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("row json: ") + e.what());
    }
    RowRecord row;
    row.id = j.at("id").get<std::string>();
    row.label = j.at("label").get<std::string>();
    row.method = method_from_name(j.at("method").get<std::string>());
    row.rep = j.at("rep").get<int>();
    row.template_id = j.at("template_id").get<int>();
    row.d_count = j.at("d").get<int>();
    row.seed = j.at("seed").get<std::uint64_t>();
    row.response = j.at("response").get<std::string>();
    row.metrics = metrics_from_json(j.at("metrics"));
    row.calls = j.at("calls").get<int>();
    row.tokens = j.at("tokens").get<int>();
    row.failed = j.at("failed").get<bool>();
    row.error = j.value("error", "");
    return row;
}

Harness::Harness(Backend& backend, ExperimentConfig cfg)
    : backend_(backend), cfg_(std::move(cfg)) {
    validate(cfg_);
    if (cfg_.catalog_path.empty()) {
        catalog_en_ = default_catalog_en();
        catalog_zh_ = default_catalog_zh();
    } else {
        catalog_en_ = TemplateCatalog::from_json_file(cfg_.catalog_path);
        catalog_zh_ = catalog_en_.lang == "zh" ? catalog_en_ : default_catalog_zh();
        if (catalog_en_.lang == "zh") catalog_en_ = default_catalog_en();
    }

    std::vector<CorpusSample> samples;
    try {
        samples = load_corpus(cfg_.corpus_path, cfg_.corpus_format);
    } catch (const Error& e) {
        throw CorpusError(e.what());
    }
    if (samples.empty()) throw CorpusError("corpus is empty: " + cfg_.corpus_path);

    std::vector<CorpusSample> train;
    for (auto& s : samples)
        (s.split == Split::Train ? train : eval_samples_).push_back(s);
    if (eval_samples_.empty()) throw CorpusError("corpus has no test-split samples");

    if (cfg_.fewshot_k > 0) {
        std::vector<CorpusSample> train_en, train_zh;
        for (auto& s : train)
            (s.lang == Lang::Zh ? train_zh : train_en).push_back(s);
        bool need_en = false, need_zh = false;
        for (const auto& s : eval_samples_)
            (s.lang == Lang::Zh ? need_zh : need_en) = true;
        if (need_en) {
            fewshot_prefix_en_ = build_fewshot_prompt(train_en, cfg_.fewshot_k, cfg_.seed,
                                                      catalog_en_.markers);
            auto ids = fewshot_selection(train_en, cfg_.fewshot_k, cfg_.seed);
            fewshot_ids_.insert(fewshot_ids_.end(), ids.begin(), ids.end());
        }
        if (need_zh) {
            fewshot_prefix_zh_ = build_fewshot_prompt(train_zh, cfg_.fewshot_k, cfg_.seed,
                                                      catalog_zh_.markers);
            auto ids = fewshot_selection(train_zh, cfg_.fewshot_k, cfg_.seed);
            fewshot_ids_.insert(fewshot_ids_.end(), ids.begin(), ids.end());
        }
        // leakage check: no exemplar may be part of the eval set
        std::set<std::string> eval_ids;
        for (const auto& s : eval_samples_) eval_ids.insert(s.id);
        for (const auto& id : fewshot_ids_)
            if (eval_ids.count(id))
                throw CorpusError("few-shot exemplar leaks into test set: " + id);
    }
}

RowRecord Harness::run_row(const CorpusSample& sample, const Variant& v, int rep) {
    RowRecord row;
    row.id = sample.id;
    row.label = v.label;
    row.method = v.method;
    row.rep = rep;
    row.template_id = v.template_id;
    row.d_count = v.d_count;
    row.seed = cfg_.seed ^ fnv1a(sample.id + "\x1f" + v.label + "\x1f" + std::to_string(rep));

    HotConfig hc = cfg_.hot;
    hc.template_id = v.template_id;
    hc.d_count = v.d_count;
    hc.params.seed = row.seed;
    hc.fewshot_prefix = sample.lang == Lang::Zh ? fewshot_prefix_zh_ : fewshot_prefix_en_;

    const TemplateCatalog& catalog = sample.lang == Lang::Zh ? catalog_zh_ : catalog_en_;
    try {
        Pipeline pipeline(backend_, catalog, hc);
        HotTrace trace = pipeline.run_method(sample.dialogue, v.method);
        row.response = trace.response.text;
        row.calls = trace.calls;
        row.tokens = trace.generated_tokens;
        LangMode mode = cfg_.lang_mode.value_or(
            sample.lang == Lang::Zh ? LangMode::CJKChar : LangMode::Whitespace);
        row.metrics = score_pair(row.response, sample.reference, mode).metrics;
    } catch (const Error& e) {
        row.failed = true;
        row.error = e.what();
    }
    return row;
}

ExperimentReport Harness::execute(const std::vector<Variant>& variants) {
    // resume support: completed triples from a previous partial run
    std::map<std::tuple<std::string, std::string, int>, RowRecord> existing;
    std::filesystem::path rows_path;
    if (!cfg_.out_dir.empty()) {
        std::filesystem::create_directories(cfg_.out_dir);
        rows_path = std::filesystem::path(cfg_.out_dir) / "rows.jsonl";
        if (std::filesystem::exists(rows_path)) {
            std::istringstream in(read_file(rows_path.string()));
            std::string line;
            while (std::getline(in, line)) {
                if (trim(line).empty()) continue;
                RowRecord row = row_from_json_line(line);
                existing[{row.label, row.id, row.rep}] = row;
            }
        }
    }

    std::ofstream rows_out;
    if (!rows_path.empty())
        rows_out.open(rows_path, std::ios::binary | std::ios::app);

    ExperimentReport report;
    report.config_hash = cfg_.hash();
    report.catalog_version = catalog_en_.version;
    report.backend_id = backend_.id();
    report.provenance_note = provenance_note_for(report.backend_id);

    int failed = 0;
    for (const auto& sample : eval_samples_) {
        for (const auto& v : variants) {
            for (int rep = 1; rep <= cfg_.repetitions; ++rep) {
                auto key = std::make_tuple(v.label, sample.id, rep);
                auto it = existing.find(key);
                RowRecord row;
                if (it != existing.end()) {
                    row = it->second;
                } else {
                    row = run_row(sample, v, rep);
                    if (rows_out.is_open()) {
                        rows_out << row_to_json_line(row) << '\n';
                        rows_out.flush();
                    }
                }
                if (row.failed) ++failed;
                report.rows.push_back(std::move(row));
            }
        }
    }

    if (failed * 2 > static_cast<int>(report.rows.size()))
        throw AbortThreshold(std::to_string(failed) + " of " +
                             std::to_string(report.rows.size()) + " rows failed");

    // aggregates in variant order; failed rows are excluded from means
    for (const auto& v : variants) {
        AggregateRow agg;
        agg.label = v.label;
        agg.method = v.method;
        agg.template_id = v.template_id;
        agg.d_count = v.d_count;
        std::vector<MetricVector> ok_metrics;
        for (const auto& row : report.rows) {
            if (row.label != v.label) continue;
            if (row.failed) {
                ++agg.rows_failed;
                continue;
            }
            ok_metrics.push_back(row.metrics);
            agg.calls_mean += row.calls;
            agg.tokens_mean += row.tokens;
        }
        agg.rows_covered = static_cast<int>(ok_metrics.size());
        if (agg.rows_covered > 0) {
            agg.metrics = mean_metrics(ok_metrics);
            agg.calls_mean /= agg.rows_covered;
            agg.tokens_mean /= agg.rows_covered;
            auto var_of = [&](auto field) {
                double acc = 0;
                for (const auto& m : ok_metrics)
                    acc += std::pow(field(m) - field(agg.metrics), 2);
                return std::sqrt(acc / agg.rows_covered);
            };
            agg.stddev.bleu2 = var_of([](const MetricVector& m) { return m.bleu2; });
            agg.stddev.bleu4 = var_of([](const MetricVector& m) { return m.bleu4; });
            agg.stddev.meteor = var_of([](const MetricVector& m) { return m.meteor; });
            agg.stddev.nist2 = var_of([](const MetricVector& m) { return m.nist2; });
            agg.stddev.nist4 = var_of([](const MetricVector& m) { return m.nist4; });
        }
        report.aggregates.push_back(std::move(agg));
    }

    // mark the argmax of each metric column
    auto mark_best = [&](const std::string& name, auto field) {
        if (report.aggregates.empty()) return;
        std::size_t best = 0;
        for (std::size_t i = 1; i < report.aggregates.size(); ++i)
            if (field(report.aggregates[i].metrics) >
                field(report.aggregates[best].metrics))
                best = i;
        report.aggregates[best].best_in.push_back(name);
    };
    mark_best("bleu2", [](const MetricVector& m) { return m.bleu2; });
    mark_best("bleu4", [](const MetricVector& m) { return m.bleu4; });
    mark_best("meteor", [](const MetricVector& m) { return m.meteor; });
    mark_best("nist2", [](const MetricVector& m) { return m.nist2; });
    mark_best("nist4", [](const MetricVector& m) { return m.nist4; });

    return report;
}

ExperimentReport Harness::run() {
    std::vector<Variant> variants;
    for (Method m : cfg_.methods)
        variants.push_back({method_name(m), m, cfg_.hot.template_id, cfg_.hot.d_count});
    return execute(variants);
}

ExperimentReport Harness::ablation_matrix() {
    std::vector<Variant> variants;
    for (Method m : {Method::Direct, Method::DiffusedOnly, Method::FocusedOnly, Method::HoT})
        variants.push_back({method_name(m), m, cfg_.hot.template_id, cfg_.hot.d_count});
    return execute(variants);
}

ExperimentReport Harness::template_sweep() {
    std::vector<Variant> variants;
    for (int t = 1; t <= 8; ++t)
        variants.push_back({"hot@t" + std::to_string(t), Method::HoT, t, cfg_.hot.d_count});
    ExperimentReport report = execute(variants);
    for (int t = 1; t <= 8; ++t)
        report.template_strings[t] = catalog_en_.diffused_template(t);
    return report;
}

ExperimentReport Harness::budget_sweep(const std::vector<int>& d_values) {
    if (d_values.empty()) throw UsageError("budget sweep needs at least one |D| value");
    for (int d : d_values)
        if (d < 1) throw UsageError("|D| must be >= 1");

    std::vector<Variant> variants;
    variants.push_back({"direct", Method::Direct, cfg_.hot.template_id, cfg_.hot.d_count});
    variants.push_back({"cot", Method::CoT, cfg_.hot.template_id, cfg_.hot.d_count});
    for (int d : d_values)
        variants.push_back({"hot@d" + std::to_string(d), Method::HoT,
                            cfg_.hot.template_id, d});

    ExperimentReport report = execute(variants);
    for (const auto& agg : report.aggregates) {
        BudgetPoint p;
        p.label = agg.label;
        p.d_count = agg.method == Method::HoT ? agg.d_count : 0;
        p.calls_mean = agg.calls_mean;
        p.tokens_mean = agg.tokens_mean;
        p.metrics = agg.metrics;
        report.budget_points.push_back(std::move(p));
    }
    return report;
}

std::string report_to_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "method,bleu2,bleu4,meteor,nist2,nist4,calls,tokens\n";
    for (const auto& a : report.aggregates) {
        out << a.label << ',' << format_fixed(a.metrics.bleu2, 4) << ','
            << format_fixed(a.metrics.bleu4, 4) << ',' << format_fixed(a.metrics.meteor, 4)
            << ',' << format_fixed(a.metrics.nist2, 4) << ','
            << format_fixed(a.metrics.nist4, 4) << ',' << format_fixed(a.calls_mean, 4)
            << ',' << format_fixed(a.tokens_mean, 4) << '\n';
    }
    return out.str();
}

std::string report_to_markdown(const ExperimentReport& report) {
    std::ostringstream out;
    out << "| Method | BLEU-2 | BLEU-4 | METEOR(es) | NIST-2 | NIST-4 | Calls | Tokens |\n";
    out << "|---|---|---|---|---|---|---|---|\n";
    for (const auto& a : report.aggregates) {
        auto cell = [&](const std::string& name, double value) {
            bool best = std::find(a.best_in.begin(), a.best_in.end(), name) !=
                        a.best_in.end();
            std::string s = format_fixed(value, 4);
            return best ? "**" + s + "**" : s;
        };
        out << "| " << a.label << " | " << cell("bleu2", a.metrics.bleu2) << " | "
            << cell("bleu4", a.metrics.bleu4) << " | " << cell("meteor", a.metrics.meteor)
            << " | " << cell("nist2", a.metrics.nist2) << " | "
            << cell("nist4", a.metrics.nist4) << " | " << format_fixed(a.calls_mean, 4)
            << " | " << format_fixed(a.tokens_mean, 4) << " |\n";
    }
    if (!report.template_strings.empty()) {
        out << "\n| Template | Text |\n|---|---|\n";
        for (const auto& [id, text] : report.template_strings)
            out << "| #" << id << " | " << text << " |\n";
    }
    if (!report.provenance_note.empty()) out << '\n' << report.provenance_note << '\n';
    return out.str();
}

std::string report_to_json(const ExperimentReport& report) {
    nlohmann::json j;
    j["config_hash"] = report.config_hash;
    j["catalog_version"] = report.catalog_version;
    j["backend_id"] = report.backend_id;
    j["provenance_note"] = report.provenance_note;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : report.rows)
        j["rows"].push_back(nlohmann::json::parse(row_to_json_line(row)));
    j["aggregates"] = nlohmann::json::array();
    for (const auto& a : report.aggregates) {
        j["aggregates"].push_back({{"label", a.label},
                                   {"method", method_name(a.method)},
                                   {"template_id", a.template_id},
                                   {"d", a.d_count},
                                   {"metrics", metrics_to_json(a.metrics)},
                                   {"stddev", metrics_to_json(a.stddev)},
                                   {"calls_mean", a.calls_mean},
                                   {"tokens_mean", a.tokens_mean},
                                   {"rows_covered", a.rows_covered},
                                   {"rows_failed", a.rows_failed},
                                   {"best_in", a.best_in}});
    }
    j["budget_points"] = nlohmann::json::array();
    for (const auto& p : report.budget_points)
        j["budget_points"].push_back({{"label", p.label},
                                      {"d", p.d_count},
                                      {"calls_mean", p.calls_mean},
                                      {"tokens_mean", p.tokens_mean},
                                      {"metrics", metrics_to_json(p.metrics)}});
    j["template_strings"] = nlohmann::json::object();
    for (const auto& [id, text] : report.template_strings)
        j["template_strings"][std::to_string(id)] = text;
    return j.dump(2);
}

ExperimentReport report_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report json: ") + e.what());
    }
    ExperimentReport report;
    report.config_hash = j.at("config_hash").get<std::string>();
    report.catalog_version = j.at("catalog_version").get<std::string>();
    report.backend_id = j.at("backend_id").get<std::string>();
    report.provenance_note = j.value("provenance_note", "");
    for (const auto& row : j.at("rows"))
        report.rows.push_back(row_from_json_line(row.dump()));
    for (const auto& a : j.at("aggregates")) {
        AggregateRow agg;
        agg.label = a.at("label").get<std::string>();
        agg.method = method_from_name(a.at("method").get<std::string>());
        agg.template_id = a.at("template_id").get<int>();
        agg.d_count = a.at("d").get<int>();
        agg.metrics = metrics_from_json(a.at("metrics"));
        agg.stddev = metrics_from_json(a.at("stddev"));
        agg.calls_mean = a.at("calls_mean").get<double>();
        agg.tokens_mean = a.at("tokens_mean").get<double>();
        agg.rows_covered = a.at("rows_covered").get<int>();
        agg.rows_failed = a.at("rows_failed").get<int>();
        agg.best_in = a.at("best_in").get<std::vector<std::string>>();
        report.aggregates.push_back(std::move(agg));
    }
    for (const auto& p : j.at("budget_points")) {
        BudgetPoint point;
        point.label = p.at("label").get<std::string>();
        point.d_count = p.at("d").get<int>();
        point.calls_mean = p.at("calls_mean").get<double>();
        point.tokens_mean = p.at("tokens_mean").get<double>();
        point.metrics = metrics_from_json(p.at("metrics"));
        report.budget_points.push_back(std::move(point));
    }
    for (const auto& [id, text] : j.at("template_strings").items())
        report.template_strings[std::stoi(id)] = text.get<std::string>();
    return report;
}

void write_run_dir(const ExperimentReport& report, const ExperimentConfig& cfg) {
    if (cfg.out_dir.empty()) throw UsageError("no output directory configured");
    std::filesystem::create_directories(cfg.out_dir);
    auto path = [&](const char* name) {
        return (std::filesystem::path(cfg.out_dir) / name).string();
    };

    // rows.jsonl is rewritten from the report so a resumed run converges
    // to the same file content ordering as an uninterrupted one
    std::ostringstream rows;
    for (const auto& row : report.rows) rows << row_to_json_line(row) << '\n';
    write_file(path("rows.jsonl"), rows.str());

    nlohmann::json config_json = nlohmann::json::parse(cfg.to_json_string());
    config_json["config_hash"] = report.config_hash;
    config_json["backend_id"] = report.backend_id;
    config_json["catalog_version"] = report.catalog_version;
    auto now = std::chrono::system_clock::now().time_since_epoch();
    config_json["timestamp_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    write_file(path("config.json"), config_json.dump(2) + "\n");

    write_file(path("report.csv"), report_to_csv(report));
    write_file(path("report.md"), report_to_markdown(report));
    write_file(path("report.json"), report_to_json(report) + "\n");
}

}  // namespace hot

// `hot` command line front end. All data goes to stdout, diagnostics to
// stderr. Exit codes: 0 success, 1 usage error, 2 runtime failure.

#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hot/backend_factory.hpp"
#include "hot/corpus.hpp"
#include "hot/errors.hpp"
#include "hot/harness.hpp"
#include "hot/likelihood.hpp"
#include "hot/markov.hpp"
#include "hot/metrics.hpp"
#include "hot/pipeline.hpp"
#include "hot/util.hpp"

namespace {

using namespace hot;

std::vector<Method> parse_method_list(const std::string& spec) {
    std::vector<Method> methods;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) methods.push_back(method_from_name(item));
    }
    if (methods.empty()) throw UsageError("empty method list");
    return methods;
}

std::vector<int> parse_int_list(const std::string& spec) {
    std::vector<int> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw UsageError("bad integer in list: " + item);
        }
    }
    return out;
}

// Shared experiment options. --config loads a JSON file first; any flag
// given on the command line overrides the loaded value.
struct ExperimentOpts {
    std::string config_path;
    std::string backend_config;
    std::string corpus;
    std::string format;
    std::string methods;
    std::string out_dir;
    std::string catalog;
    std::string lang_mode;
    std::string fusion_order;
    std::string focused_mode;
    int reps = 3;
    std::uint64_t seed = 0;
    int d = 3;
    int template_id = 1;
    double temperature = 0.5;
    int max_tokens = 168;
    int fewshot = 0;

    CLI::App* app = nullptr;

    void attach(CLI::App* sub) {
        app = sub;
        sub->add_option("--config", config_path, "experiment config JSON file");
        sub->add_option("--backend-config", backend_config, "backend config JSON file")
            ->required();
        sub->add_option("--corpus", corpus, "corpus file");
        sub->add_option("--format", format, "corpus format");
        sub->add_option("--methods", methods, "comma-separated method list");
        sub->add_option("--out", out_dir, "run output directory");
        sub->add_option("--catalog", catalog, "template catalog JSON file");
        sub->add_option("--lang-mode", lang_mode, "whitespace or cjk-char");
        sub->add_option("--fusion-order", fusion_order, "fused prompt section order");
        sub->add_option("--focused-mode", focused_mode, "single-call or per-item");
        sub->add_option("--reps", reps, "repetitions per sample");
        sub->add_option("--seed", seed, "base seed");
        sub->add_option("--d", d, "diffused sample count |D|");
        sub->add_option("--template", template_id, "diffused template id 1-8");
        sub->add_option("--temperature", temperature, "sampling temperature");
        sub->add_option("--max-tokens", max_tokens, "generation token budget");
        sub->add_option("--fewshot", fewshot, "few-shot exemplar count (0 or 5)");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig cfg;
        if (!config_path.empty())
            cfg = ExperimentConfig::from_json_string(read_file(config_path));
        auto given = [&](const char* name) { return app->count(name) > 0; };
        if (given("--corpus")) cfg.corpus_path = corpus;
        if (given("--format")) cfg.corpus_format = format;
        if (given("--methods")) cfg.methods = parse_method_list(methods);
        if (given("--out")) cfg.out_dir = out_dir;
        if (given("--catalog")) cfg.catalog_path = catalog;
        if (given("--lang-mode")) cfg.lang_mode = lang_mode_from_string(lang_mode);
        if (given("--fusion-order"))
            cfg.hot.fusion_order = fusion_order_from_string(fusion_order);
        if (given("--focused-mode"))
            cfg.hot.focused_mode = focused_mode == "per-item" ? FocusedMode::PerItem
                                                              : FocusedMode::SingleCall;
        if (given("--reps")) cfg.repetitions = reps;
        if (given("--seed")) cfg.seed = seed;
        if (given("--d")) cfg.hot.d_count = d;
        if (given("--template")) cfg.hot.template_id = template_id;
        if (given("--temperature")) cfg.hot.params.temperature = temperature;
        if (given("--max-tokens")) cfg.hot.params.max_tokens = max_tokens;
        if (given("--fewshot")) cfg.fewshot_k = fewshot;
        if (cfg.corpus_path.empty()) throw UsageError("no corpus given (--corpus)");
        return cfg;
    }
};

void emit_report(const ExperimentReport& report, const ExperimentConfig& cfg) {
    if (!cfg.out_dir.empty()) {
        write_run_dir(report, cfg);
        std::cerr << "run directory: " << cfg.out_dir << "\n";
    }
    std::cout << report_to_csv(report);
    if (!report.provenance_note.empty()) std::cerr << report.provenance_note << "\n";
}

int cmd_experiment(const ExperimentOpts& opts, const std::string& mode,
                   const std::vector<int>& d_values) {
    ExperimentConfig cfg = opts.resolve();
    auto backend = backend_from_config_file(opts.backend_config);
    Harness harness(*backend, cfg);
    ExperimentReport report;
    if (mode == "run")
        report = harness.run();
    else if (mode == "ablate")
        report = harness.ablation_matrix();
    else if (mode == "sweep-templates")
        report = harness.template_sweep();
    else
        report = harness.budget_sweep(d_values);
    emit_report(report, cfg);
    return 0;
}

int cmd_eval_metrics(const std::string& pairs_path, const std::string& lang_mode) {
    std::istringstream in(read_file(pairs_path));
    std::string line;
    int lineno = 0;
    std::vector<MetricVector> rows;
    std::cout << "index,bleu2,bleu4,meteor,nist2,nist4\n";
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
        LangMode mode = lang_mode.empty()
                            ? lang_mode_from_string(j.value("lang_mode", "whitespace"))
                            : lang_mode_from_string(lang_mode);
        auto score = score_pair(j.at("hypothesis").get<std::string>(),
                                j.at("reference").get<std::string>(), mode);
        rows.push_back(score.metrics);
        const MetricVector& m = score.metrics;
        std::cout << lineno << ',' << format_fixed(m.bleu2, 4) << ','
                  << format_fixed(m.bleu4, 4) << ',' << format_fixed(m.meteor, 4) << ','
                  << format_fixed(m.nist2, 4) << ',' << format_fixed(m.nist4, 4) << '\n';
    }
    if (rows.empty()) throw UsageError("no pairs in " + pairs_path);
    MetricVector mean = mean_metrics(rows);
    std::cout << "mean," << format_fixed(mean.bleu2, 4) << ',' << format_fixed(mean.bleu4, 4)
              << ',' << format_fixed(mean.meteor, 4) << ',' << format_fixed(mean.nist2, 4)
              << ',' << format_fixed(mean.nist4, 4) << '\n';
    return 0;
}

int cmd_verify_factorization(const std::string& model_path, const std::string& context,
                             int d_len, int f_len, bool chained,
                             const std::string& answer) {
    MarkovModel model = MarkovModel::from_json_file(model_path);
    std::vector<std::string> ctx = split_ws(context);
    FactorizationReport report = chained
                                     ? check_factorization_chained(model, ctx, d_len, f_len)
                                     : check_factorization(model, ctx, d_len, f_len);
    nlohmann::json j = nlohmann::json::parse(report.to_json_string());
    j["mode"] = chained ? "chained" : "independent";
    if (!answer.empty()) {
        auto a = split_ws(answer);
        j["marginal_factorized"] = marginal_answer_prob_factorized(model, ctx, d_len, f_len, a);
        j["marginal_enumerated"] = marginal_answer_prob_enumerated(model, ctx, d_len, f_len, a);
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_anonymize(const std::string& input, const std::string& rules_path) {
    auto rules = rules_path.empty() ? default_anonymization_rules()
                                    : rules_from_json_file(rules_path);
    std::string text;
    if (input.empty() || input == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        text = buf.str();
    } else {
        text = read_file(input);
    }
    AnonymizationResult result = anonymize(text, rules);
    std::cout << result.text;
    for (const auto& [cat, count] : result.substitutions)
        std::cerr << placeholder_for(cat) << ": " << count << "\n";
    return 0;
}

int cmd_ingest(const std::string& input, const std::string& format,
               const std::string& output, bool anonymize_text) {
    auto samples = load_corpus(input, format);
    if (anonymize_text) {
        auto rules = default_anonymization_rules();
        for (auto& s : samples) {
            for (auto& t : s.dialogue.turns) t.text = anonymize(t.text, rules).text;
            if (s.dialogue.description)
                s.dialogue.description = anonymize(*s.dialogue.description, rules).text;
            s.reference = anonymize(s.reference, rules).text;
        }
    }
    if (output.empty() || output == "-")
        std::cout << serialize_corpus(samples);
    else
        save_corpus(samples, output);
    std::cerr << samples.size() << " samples\n";
    return 0;
}

int cmd_respond(const std::string& backend_config, const std::string& corpus_path,
                const std::string& format, const std::string& id,
                const std::string& method_str, int d, int template_id,
                std::uint64_t seed, double temperature, int max_tokens, bool trace_out) {
    auto backend = backend_from_config_file(backend_config);
    auto samples = load_corpus(corpus_path, format);
    const CorpusSample* sample = nullptr;
    for (const auto& s : samples)
        if (id.empty() || s.id == id) {
            sample = &s;
            break;
        }
    if (!sample) throw UsageError("sample not found: " + id);

    HotConfig cfg;
    cfg.d_count = d;
    cfg.template_id = template_id;
    cfg.params.seed = seed;
    cfg.params.temperature = temperature;
    cfg.params.max_tokens = max_tokens;
    TemplateCatalog catalog = default_catalog(lang_name(sample->lang));
    Pipeline pipeline(*backend, catalog, cfg);
    HotTrace trace = pipeline.run_method(sample->dialogue, method_from_name(method_str));
    std::cout << trace.response.text << "\n";
    if (trace_out) std::cerr << trace.to_json_string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"holistic-thought dialogue pipeline"};
    app.require_subcommand(1);

    ExperimentOpts run_opts, ablate_opts, sweep_t_opts, sweep_b_opts;
    run_opts.attach(app.add_subcommand("run", "run methods over a corpus"));
    ablate_opts.attach(app.add_subcommand("ablate", "direct/diffused/focused/hot matrix"));
    sweep_t_opts.attach(app.add_subcommand("sweep-templates", "hot across templates 1-8"));
    auto* sweep_b = app.add_subcommand("sweep-budget", "hot across |D| values");
    sweep_b_opts.attach(sweep_b);
    std::string d_values_str = "1,2,3,4";
    sweep_b->add_option("--d-values", d_values_str, "comma-separated |D| list");

    auto* eval = app.add_subcommand("eval-metrics", "score hypothesis/reference pairs");
    std::string pairs_path, eval_lang_mode;
    eval->add_option("--pairs", pairs_path, "JSONL with hypothesis/reference fields")
        ->required();
    eval->add_option("--lang-mode", eval_lang_mode, "force whitespace or cjk-char");

    auto* verify = app.add_subcommand("verify-factorization",
                                      "check the likelihood factorization numerically");
    std::string model_path, context_str, answer_str;
    int d_len = 1, f_len = 1;
    bool chained = false;
    verify->add_option("--model", model_path, "markov model JSON file")->required();
    verify->add_option("--context", context_str, "space-separated context tokens");
    verify->add_option("--d-len", d_len, "diffused draw length");
    verify->add_option("--f-len", f_len, "focused draw length");
    verify->add_flag("--chained", chained, "sample F from the chained context C+D");
    verify->add_option("--answer", answer_str, "also compute the answer marginal");

    auto* anon = app.add_subcommand("anonymize", "replace PII with placeholders");
    std::string anon_input, anon_rules;
    anon->add_option("--input", anon_input, "text file ('-' for stdin)");
    anon->add_option("--rules", anon_rules, "rules JSON file");

    auto* ingest = app.add_subcommand("ingest", "convert a corpus to canonical JSONL");
    std::string ingest_input, ingest_format = "canonical-jsonl", ingest_output;
    bool ingest_anon = false;
    ingest->add_option("--input", ingest_input, "source corpus file")->required();
    ingest->add_option("--format", ingest_format, "source format");
    ingest->add_option("--output", ingest_output, "destination ('-' for stdout)");
    ingest->add_flag("--anonymize", ingest_anon, "apply the bundled PII rules");

    auto* respond = app.add_subcommand("respond", "generate one doctor reply");
    std::string r_backend, r_corpus, r_format = "canonical-jsonl", r_id, r_method = "hot";
    int r_d = 3, r_template = 1, r_max_tokens = 168;
    std::uint64_t r_seed = 0;
    double r_temperature = 0.5;
    bool r_trace = false;
    respond->add_option("--backend-config", r_backend, "backend config JSON file")
        ->required();
    respond->add_option("--corpus", r_corpus, "corpus file with the dialogue")->required();
    respond->add_option("--format", r_format, "corpus format");
    respond->add_option("--id", r_id, "sample id (default: first sample)");
    respond->add_option("--method", r_method, "direct|cot|diffused-only|focused-only|hot");
    respond->add_option("--d", r_d, "diffused sample count |D|");
    respond->add_option("--template", r_template, "diffused template id 1-8");
    respond->add_option("--seed", r_seed, "sampling seed");
    respond->add_option("--temperature", r_temperature, "sampling temperature");
    respond->add_option("--max-tokens", r_max_tokens, "generation token budget");
    respond->add_flag("--trace", r_trace, "print the full trace JSON to stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run_opts.app->parsed()) return cmd_experiment(run_opts, "run", {});
        if (ablate_opts.app->parsed()) return cmd_experiment(ablate_opts, "ablate", {});
        if (sweep_t_opts.app->parsed())
            return cmd_experiment(sweep_t_opts, "sweep-templates", {});
        if (sweep_b_opts.app->parsed())
            return cmd_experiment(sweep_b_opts, "sweep-budget", parse_int_list(d_values_str));
        if (eval->parsed()) return cmd_eval_metrics(pairs_path, eval_lang_mode);
        if (verify->parsed())
            return cmd_verify_factorization(model_path, context_str, d_len, f_len, chained,
                                            answer_str);
        if (anon->parsed()) return cmd_anonymize(anon_input, anon_rules);
        if (ingest->parsed())
            return cmd_ingest(ingest_input, ingest_format, ingest_output, ingest_anon);
        if (respond->parsed())
            return cmd_respond(r_backend, r_corpus, r_format, r_id, r_method, r_d,
                               r_template, r_seed, r_temperature, r_max_tokens, r_trace);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const hot::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hot/backend_factory.hpp"
#include "hot/errors.hpp"
#include "hot/harness.hpp"
#include "hot/util.hpp"

using namespace hot;

namespace {

const std::string kFixtures = HOT_FIXTURE_DIR;

ExperimentConfig base_config() {
    ExperimentConfig cfg;
    cfg.corpus_path = kFixtures + "/en.jsonl";
    cfg.methods = {Method::Direct, Method::CoT, Method::HoT};
    cfg.repetitions = 2;
    cfg.seed = 42;
    return cfg;
}

std::unique_ptr<Backend> quality_backend() {
    return backend_from_config_file(kFixtures + "/backend_mock.json");
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const char* tag) {
        path = std::filesystem::temp_directory_path() /
               (std::string("hot_test_") + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("run produces one row per sample x method x rep and ordered aggregates") {
    auto backend = quality_backend();
    Harness h(*backend, base_config());
    auto report = h.run();
    CHECK(report.rows.size() == 20 * 3 * 2);
    REQUIRE(report.aggregates.size() == 3);
    CHECK(report.aggregates[0].label == "direct");
    CHECK(report.aggregates[1].label == "cot");
    CHECK(report.aggregates[2].label == "hot");
    CHECK(report.aggregates[0].calls_mean == doctest::Approx(1.0));
    CHECK(report.aggregates[1].calls_mean == doctest::Approx(2.0));
    CHECK(report.aggregates[2].calls_mean == doctest::Approx(5.0));
    CHECK(report.backend_id == "mock");
    CHECK(!report.provenance_note.empty());
    // the fused mock parrots the references, so hot dominates
    CHECK(report.aggregates[2].metrics.bleu2 >
          report.aggregates[0].metrics.bleu2 + 0.3);
    auto& best = report.aggregates[2].best_in;
    CHECK(std::find(best.begin(), best.end(), "bleu2") != best.end());
}

TEST_CASE("per-row seeds never collide") {
    auto backend = quality_backend();
    auto cfg = base_config();
    cfg.repetitions = 3;
    Harness h(*backend, cfg);
    auto report = h.run();
    std::set<std::uint64_t> seeds;
    for (const auto& row : report.rows) seeds.insert(row.seed);
    CHECK(seeds.size() == report.rows.size());
}

TEST_CASE("reports are byte-identical across reruns and survive json round trips") {
    auto backend = quality_backend();
    Harness h1(*backend, base_config());
    Harness h2(*backend, base_config());
    auto r1 = h1.run();
    auto r2 = h2.run();
    CHECK(report_to_csv(r1) == report_to_csv(r2));
    CHECK(report_to_json(r1) == report_to_json(r2));
    CHECK(report_to_markdown(r1) == report_to_markdown(r2));

    auto back = report_from_json(report_to_json(r1));
    CHECK(back == r1);
}

TEST_CASE("aggregates recompute from rows") {
    auto backend = quality_backend();
    Harness h(*backend, base_config());
    auto report = h.run();
    for (const auto& agg : report.aggregates) {
        double sum = 0;
        int n = 0;
        for (const auto& row : report.rows) {
            if (row.label != agg.label || row.failed) continue;
            sum += row.metrics.bleu2;
            ++n;
        }
        CHECK(n == agg.rows_covered);
        CHECK(agg.metrics.bleu2 == doctest::Approx(sum / n).epsilon(1e-9));
    }
}

TEST_CASE("csv layout is fixed and 4-decimal") {
    auto backend = quality_backend();
    Harness h(*backend, base_config());
    auto csv = report_to_csv(h.run());
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "method,bleu2,bleu4,meteor,nist2,nist4,calls,tokens");
    std::string line;
    while (std::getline(in, line)) {
        auto cols = 1 + std::count(line.begin(), line.end(), ',');
        CHECK(cols == 8);
    }
}

TEST_CASE("write_run_dir emits the run artifacts and resume completes a partial run") {
    TempDir dir("resume");
    auto cfg = base_config();
    cfg.out_dir = dir.path.string();
    auto backend = quality_backend();

    Harness full(*backend, cfg);
    auto report = full.run();
    write_run_dir(report, cfg);
    for (const char* f : {"config.json", "rows.jsonl", "report.csv", "report.md",
                          "report.json"})
        CHECK(std::filesystem::exists(dir.path / f));
    auto rows_full = read_file((dir.path / "rows.jsonl").string());
    auto csv_full = read_file((dir.path / "report.csv").string());

    // truncate rows.jsonl to simulate an interrupted run, then resume
    std::istringstream in(rows_full);
    std::string line, half;
    int keep = static_cast<int>(report.rows.size()) / 2;
    for (int i = 0; i < keep && std::getline(in, line); ++i) half += line + "\n";
    write_file((dir.path / "rows.jsonl").string(), half);

    Harness resumed(*backend, cfg);
    auto report2 = resumed.run();
    write_run_dir(report2, cfg);
    CHECK(report2 == report);
    CHECK(read_file((dir.path / "rows.jsonl").string()) == rows_full);
    CHECK(read_file((dir.path / "report.csv").string()) == csv_full);
}

TEST_CASE("config json round trips and hashes stably") {
    auto cfg = base_config();
    cfg.hot.d_count = 4;
    cfg.fewshot_k = 5;
    cfg.lang_mode = LangMode::CJKChar;
    auto back = ExperimentConfig::from_json_string(cfg.to_json_string());
    CHECK(back.to_json_string() == cfg.to_json_string());
    CHECK(back.hash() == cfg.hash());
    back.seed += 1;
    CHECK(back.hash() != cfg.hash());
}

TEST_CASE("config validation rejects nonsense") {
    auto cfg = base_config();
    cfg.repetitions = 0;
    CHECK_THROWS_AS(validate(cfg), UsageError);
    cfg = base_config();
    cfg.methods.clear();
    CHECK_THROWS_AS(validate(cfg), UsageError);
    cfg = base_config();
    cfg.fewshot_k = 3;
    CHECK_THROWS_AS(validate(cfg), UsageError);
}

TEST_CASE("ablation matrix runs the four-strategy grid") {
    auto backend = quality_backend();
    auto cfg = base_config();
    cfg.repetitions = 1;
    Harness h(*backend, cfg);
    auto report = h.ablation_matrix();
    REQUIRE(report.aggregates.size() == 4);
    CHECK(report.aggregates[0].label == "direct");
    CHECK(report.aggregates[1].label == "diffused-only");
    CHECK(report.aggregates[2].label == "focused-only");
    CHECK(report.aggregates[3].label == "hot");
}

TEST_CASE("template sweep records all eight template strings verbatim") {
    auto backend = quality_backend();
    auto cfg = base_config();
    cfg.repetitions = 1;
    Harness h(*backend, cfg);
    auto report = h.template_sweep();
    REQUIRE(report.aggregates.size() == 8);
    CHECK(report.aggregates[0].label == "hot@t1");
    CHECK(report.aggregates[7].label == "hot@t8");
    REQUIRE(report.template_strings.size() == 8);
    CHECK(report.template_strings.at(1) == "Doctor:");
    CHECK(report.template_strings.at(4) == "Let's reason like a medical expert:");
    auto md = report_to_markdown(report);
    for (const auto& [id, text] : report.template_strings)
        CHECK(md.find(text) != std::string::npos);
}

TEST_CASE("budget sweep anchors direct and cot and tracks |D|") {
    auto backend = quality_backend();
    auto cfg = base_config();
    cfg.repetitions = 1;
    Harness h(*backend, cfg);
    auto report = h.budget_sweep({1, 2, 4});
    REQUIRE(report.budget_points.size() == 5);
    CHECK(report.budget_points[0].label == "direct");
    CHECK(report.budget_points[0].calls_mean == doctest::Approx(1.0));
    CHECK(report.budget_points[1].label == "cot");
    CHECK(report.budget_points[2].calls_mean == doctest::Approx(3.0));  // hot@d1
    CHECK(report.budget_points[3].calls_mean == doctest::Approx(4.0));  // hot@d2
    CHECK(report.budget_points[4].calls_mean == doctest::Approx(6.0));  // hot@d4
    CHECK_THROWS_AS(h.budget_sweep({}), UsageError);
}

TEST_CASE("fewshot exemplars come from the train split only") {
    auto backend = quality_backend();
    auto cfg = base_config();
    cfg.fewshot_k = 5;
    cfg.repetitions = 1;
    cfg.methods = {Method::Direct};
    Harness h(*backend, cfg);
    CHECK(h.fewshot_ids().size() == 5);
    auto samples = load_corpus(cfg.corpus_path);
    std::set<std::string> test_ids;
    for (const auto& s : samples)
        if (s.split == Split::Test) test_ids.insert(s.id);
    for (const auto& id : h.fewshot_ids()) CHECK(test_ids.count(id) == 0);
    CHECK_NOTHROW(h.run());
}

TEST_CASE("zh corpus scores with cjk tokenization by default") {
    auto backend = quality_backend();
    auto cfg = base_config();
    cfg.corpus_path = kFixtures + "/zh.jsonl";
    cfg.repetitions = 1;
    cfg.methods = {Method::Direct, Method::HoT};
    Harness h(*backend, cfg);
    auto report = h.run();
    CHECK(report.aggregates[1].metrics.bleu2 >
          report.aggregates[0].metrics.bleu2 + 0.3);
}

TEST_CASE("a backend that always fails trips the abort threshold") {
    MockBackend broken(std::map<std::string, std::string>{{"never-matches", "x"}});
    auto cfg = base_config();
    cfg.repetitions = 1;
    Harness h(broken, cfg);
    CHECK_THROWS_AS(h.run(), AbortThreshold);
}

TEST_CASE("row json round trips including failures") {
    RowRecord row;
    row.id = "en-041";
    row.label = "hot@t3";
    row.method = Method::HoT;
    row.rep = 2;
    row.template_id = 3;
    row.d_count = 4;
    row.seed = 0xdeadbeef;
    row.response = "rest and hydrate";
    row.metrics.bleu2 = 0.25;
    row.calls = 6;
    row.tokens = 80;
    CHECK(row_from_json_line(row_to_json_line(row)) == row);
    row.failed = true;
    row.error = "stage fuse: boom";
    CHECK(row_from_json_line(row_to_json_line(row)) == row);
    CHECK_THROWS_AS(row_from_json_line("{broken"), ParseError);
}

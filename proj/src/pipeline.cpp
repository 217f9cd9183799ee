#include "hot/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include <nlohmann/json.hpp>

#include "hot/errors.hpp"
#include "hot/util.hpp"

namespace hot {

namespace {

// Seed-stream layout: diffused slots use seed+j, focused calls and the
// fusion pass live in disjoint offsets so stages never share randomness.
constexpr std::uint64_t kFocusedSeedOffset = 500000;
constexpr std::uint64_t kFuseSeedOffset = 900000;
constexpr std::uint64_t kResampleSeedStep = 1000;

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::Direct: return "direct";
        case Method::CoT: return "cot";
        case Method::DiffusedOnly: return "diffused-only";
        case Method::FocusedOnly: return "focused-only";
        case Method::HoT: return "hot";
    }
    return "?";
}

Method method_from_name(const std::string& name) {
    for (Method m : all_methods())
        if (method_name(m) == name) return m;
    throw UsageError("unknown method: " + name);
}

std::vector<Method> all_methods() {
    return {Method::Direct, Method::CoT, Method::DiffusedOnly, Method::FocusedOnly,
            Method::HoT};
}

void validate(const HotConfig& cfg) {
    if (cfg.d_count < 1) throw UsageError("|D| must be >= 1");
    validate(cfg.params);
    validate(cfg.schema);
    if (cfg.schema.items.empty()) throw UsageError("record schema is empty");
}

FilterResult answer_format_filter_ex(const std::string& raw,
                                     const std::vector<std::string>& markers) {
    std::string s = trim(raw);

    // Strip a leading trigger echo ("Doctor:" and friends).
    bool stripped = true;
    while (stripped) {
        stripped = false;
        for (const auto& marker : markers) {
            if (!marker.empty() && s.rfind(marker, 0) == 0) {
                s = trim(s.substr(marker.size()));
                stripped = true;
            }
        }
    }

    FilterResult result;
    std::size_t cut = std::string::npos;
    for (const auto& marker : markers) {
        if (marker.empty()) continue;
        auto pos = s.find(marker);
        if (pos != std::string::npos && pos < cut) cut = pos;
    }
    if (cut != std::string::npos) {
        s = s.substr(0, cut);
        result.truncated = true;
    }
    result.text = trim(s);
    return result;
}

std::string answer_format_filter(const std::string& raw, const MarkerTable& markers) {
    return answer_format_filter_ex(raw, markers.all()).text;
}

Pipeline::Pipeline(Backend& backend, TemplateCatalog catalog, HotConfig cfg)
    : backend_(backend), catalog_(std::move(catalog)), cfg_(std::move(cfg)) {
    validate(cfg_);
}

std::string Pipeline::with_prefix(const std::string& prompt) const {
    if (cfg_.fewshot_prefix.empty()) return prompt;
    return cfg_.fewshot_prefix + "\n\n" + prompt;
}

Completion Pipeline::call(const std::string& stage, const std::string& prompt,
                          std::uint64_t seed, HotTrace* trace) {
    GenerationParams params = cfg_.params;
    params.seed = seed;
    Completion c;
    try {
        c = backend_.generate(prompt, params);
    } catch (const Error& e) {
        throw Error("stage " + stage + ": " + e.what());
    }
    if (trace) {
        trace->prompts.push_back({stage, prompt, c});
        trace->calls = static_cast<int>(trace->prompts.size());
        trace->generated_tokens += static_cast<int>(c.tokens.size());
    }
    return c;
}

FilterResult Pipeline::filter(const std::string& raw) const {
    FilterResult r = answer_format_filter_ex(raw, catalog_.markers.all());
    if (cfg_.filter_policy == FilterPolicy::Discard && r.truncated) r.text.clear();
    return r;
}

DiffusedThoughts Pipeline::diffused_thinking(const DialogueHistory& history, HotTrace* trace) {
    validate(history);
    const std::string prompt = with_prefix(
        build_diffused_prompt(catalog_, history, cfg_.template_id));

    DiffusedThoughts thoughts;
    for (int j = 1; j <= cfg_.d_count; ++j) {
        ThoughtContent tc;
        tc.index = j;
        // 2 resample attempts per slot before giving up on it
        for (int attempt = 0; attempt <= 2; ++attempt) {
            std::uint64_t seed = cfg_.params.seed + static_cast<std::uint64_t>(j) +
                                 kResampleSeedStep * static_cast<std::uint64_t>(attempt);
            auto c = call("diffused[" + std::to_string(j) + "]", prompt, seed, trace);
            tc.raw = c.text;
            tc.text = filter(c.text).text;
            if (!tc.text.empty()) break;
        }
        thoughts.items.push_back(std::move(tc));
    }
    bool all_empty = true;
    for (const auto& t : thoughts.items)
        if (!t.text.empty()) all_empty = false;
    if (all_empty) throw AllSamplesEmpty("every diffused sample filtered to empty");
    return thoughts;
}

FocusedSummary Pipeline::parse_record_completion(const std::string& text) const {
    // Locate "<Item>:" headers; entry text runs until the next header.
    struct Hit {
        std::size_t begin;  // header start
        std::size_t end;    // just past the colon
        std::size_t item;
    };
    std::vector<Hit> hits;
    for (std::size_t i = 0; i < cfg_.schema.items.size(); ++i) {
        const std::string header = cfg_.schema.items[i] + ":";
        auto pos = text.find(header);
        if (pos != std::string::npos) hits.push_back({pos, pos + header.size(), i});
    }
    if (hits.empty()) throw SummaryParseFailure("no record item header matched");
    std::sort(hits.begin(), hits.end(),
              [](const Hit& a, const Hit& b) { return a.begin < b.begin; });

    FocusedSummary summary;
    for (std::size_t i = 0; i < cfg_.schema.items.size(); ++i) {
        RecordEntry entry;
        entry.item = cfg_.schema.items[i];
        auto hit = std::find_if(hits.begin(), hits.end(),
                                [i](const Hit& h) { return h.item == i; });
        if (hit == hits.end()) {
            entry.empty = true;
        } else {
            auto next = hit + 1;
            std::size_t stop = next != hits.end() ? next->begin : text.size();
            entry.text = trim(text.substr(hit->end, stop - hit->end));
            entry.empty = entry.text.empty();
        }
        summary.entries.push_back(std::move(entry));
    }
    return summary;
}

FocusedSummary Pipeline::focused_thinking(const DialogueHistory& history, HotTrace* trace) {
    validate(history);
    if (cfg_.focused_mode == FocusedMode::SingleCall) {
        const std::string prompt =
            with_prefix(build_focused_record_prompt(catalog_, history, cfg_.schema));
        auto c = call("focused", prompt, cfg_.params.seed + kFocusedSeedOffset, trace);
        return parse_record_completion(c.text);
    }

    FocusedSummary summary;
    for (std::size_t k = 0; k < cfg_.schema.items.size(); ++k) {
        const auto& item = cfg_.schema.items[k];
        const std::string prompt =
            with_prefix(build_focused_prompt(catalog_, history, item, cfg_.schema));
        auto c = call("focused[" + item + "]", prompt,
                      cfg_.params.seed + kFocusedSeedOffset + 1 + k, trace);
        RecordEntry entry;
        entry.item = item;
        entry.text = filter(c.text).text;
        entry.empty = entry.text.empty();
        summary.entries.push_back(std::move(entry));
    }
    return summary;
}

Response Pipeline::generate_response(const DialogueHistory& history,
                                     const DiffusedThoughts& thoughts,
                                     const FocusedSummary& summary, HotTrace* trace) {
    const std::string prompt =
        with_prefix(fuse_prompt(catalog_, history, thoughts, summary, cfg_.fusion_order));
    Response resp;
    for (int attempt = 0; attempt <= 2; ++attempt) {
        auto c = call("fuse", prompt,
                      cfg_.params.seed + kFuseSeedOffset +
                          kResampleSeedStep * static_cast<std::uint64_t>(attempt),
                      trace);
        resp.raw = c.text;
        resp.text = filter(c.text).text;
        resp.token_count = static_cast<int>(c.tokens.size());
        if (!resp.text.empty()) return resp;
    }
    throw EmptyResponse("fused response empty after 2 retries");
}

HotTrace Pipeline::run_method(const DialogueHistory& history, Method method) {
    auto t0 = std::chrono::steady_clock::now();
    HotTrace trace;
    trace.method = method;

    auto finish = [&](Response resp) {
        trace.response = std::move(resp);
        trace.wall_time_ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
        return trace;
    };

    auto fused_response = [&](const DiffusedThoughts* d, const FocusedSummary* f) {
        const std::string prompt =
            with_prefix(fuse_sections(catalog_, history, d, f, cfg_.fusion_order));
        Response resp;
        for (int attempt = 0; attempt <= 2; ++attempt) {
            auto c = call("fuse", prompt,
                          cfg_.params.seed + kFuseSeedOffset +
                              kResampleSeedStep * static_cast<std::uint64_t>(attempt),
                          &trace);
            resp.raw = c.text;
            resp.text = filter(c.text).text;
            resp.token_count = static_cast<int>(c.tokens.size());
            if (!resp.text.empty()) return resp;
        }
        throw EmptyResponse("fused response empty after 2 retries");
    };

    switch (method) {
        case Method::Direct: {
            const std::string prompt =
                with_prefix(build_diffused_prompt(catalog_, history, 1));
            auto c = call("direct", prompt, cfg_.params.seed + 1, &trace);
            Response resp;
            resp.raw = c.text;
            resp.text = filter(c.text).text;
            resp.token_count = static_cast<int>(c.tokens.size());
            return finish(std::move(resp));
        }
        case Method::CoT: {
            auto prompts = build_cot_prompts(catalog_, history);
            auto c1 = call("cot-reason", with_prefix(prompts.stage1),
                           cfg_.params.seed + 1, &trace);
            auto c2 = call("cot-answer", with_prefix(prompts.stage2(trim(c1.text))),
                           cfg_.params.seed + 2, &trace);
            Response resp;
            resp.raw = c2.text;
            resp.text = filter(c2.text).text;
            resp.token_count = static_cast<int>(c2.tokens.size());
            return finish(std::move(resp));
        }
        case Method::DiffusedOnly: {
            trace.thoughts = diffused_thinking(history, &trace);
            return finish(fused_response(&*trace.thoughts, nullptr));
        }
        case Method::FocusedOnly: {
            trace.summary = focused_thinking(history, &trace);
            return finish(fused_response(nullptr, &*trace.summary));
        }
        case Method::HoT: {
            trace.thoughts = diffused_thinking(history, &trace);
            trace.summary = focused_thinking(history, &trace);
            return finish(generate_response(history, *trace.thoughts, *trace.summary, &trace));
        }
    }
    throw UsageError("unhandled method");
}

namespace {

nlohmann::json completion_to_json(const Completion& c) {
    nlohmann::json j{
        {"text", c.text},
        {"tokens", c.tokens},
        {"finish_reason", c.finish_reason == FinishReason::Stop ? "stop" : "length"},
    };
    if (c.token_logprobs) j["token_logprobs"] = *c.token_logprobs;
    return j;
}

Completion completion_from_json(const nlohmann::json& j) {
    Completion c;
    c.text = j.at("text").get<std::string>();
    c.tokens = j.at("tokens").get<std::vector<std::string>>();
    c.finish_reason =
        j.at("finish_reason").get<std::string>() == "length" ? FinishReason::Length
                                                             : FinishReason::Stop;
    if (j.contains("token_logprobs"))
        c.token_logprobs = j["token_logprobs"].get<std::vector<double>>();
    return c;
}

}  // namespace

std::string HotTrace::to_json_string() const {
    nlohmann::json j;
    j["method"] = method_name(method);
    j["calls"] = calls;
    j["generated_tokens"] = generated_tokens;
    j["wall_time_ms"] = wall_time_ms;
    j["response"] = {{"text", response.text},
                     {"raw", response.raw},
                     {"token_count", response.token_count}};
    j["prompts"] = nlohmann::json::array();
    for (const auto& s : prompts)
        j["prompts"].push_back({{"stage", s.stage},
                                {"prompt", s.prompt},
                                {"completion", completion_to_json(s.completion)}});
    if (thoughts) {
        auto arr = nlohmann::json::array();
        for (const auto& t : thoughts->items)
            arr.push_back({{"index", t.index}, {"text", t.text}, {"raw", t.raw}});
        j["thoughts"] = arr;
    }
    if (summary) {
        auto arr = nlohmann::json::array();
        for (const auto& e : summary->entries)
            arr.push_back({{"item", e.item}, {"text", e.text}, {"empty", e.empty}});
        j["summary"] = arr;
    }
    return j.dump(2);
}

HotTrace HotTrace::from_json_string(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("trace json: ") + e.what());
    }
    HotTrace t;
    t.method = method_from_name(j.at("method").get<std::string>());
    t.calls = j.at("calls").get<int>();
    t.generated_tokens = j.at("generated_tokens").get<int>();
    t.wall_time_ms = j.value("wall_time_ms", 0.0);
    t.response.text = j.at("response").at("text").get<std::string>();
    t.response.raw = j.at("response").at("raw").get<std::string>();
    t.response.token_count = j.at("response").at("token_count").get<int>();
    for (const auto& s : j.at("prompts"))
        t.prompts.push_back({s.at("stage").get<std::string>(),
                             s.at("prompt").get<std::string>(),
                             completion_from_json(s.at("completion"))});
    if (j.contains("thoughts")) {
        DiffusedThoughts d;
        for (const auto& x : j["thoughts"])
            d.items.push_back({x.at("index").get<int>(), x.at("text").get<std::string>(),
                               x.at("raw").get<std::string>()});
        t.thoughts = std::move(d);
    }
    if (j.contains("summary")) {
        FocusedSummary f;
        for (const auto& x : j["summary"])
            f.entries.push_back({x.at("item").get<std::string>(),
                                 x.at("text").get<std::string>(),
                                 x.at("empty").get<bool>()});
        t.summary = std::move(f);
    }
    return t;
}

}  // namespace hot

#pragma once
// LLM-as-a-judge evaluation: binary correctness labels per (question, gold,
// generated) triple and accuracy over JSONL datasets. The judge shares the
// pipeline's gateway and cache and always runs with the deterministic
// default generation config.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphmind/llmio.hpp"
#include "graphmind/qa.hpp"

namespace graphmind {

struct QaExample {
    std::string question;
    std::string gold;
    std::vector<std::string> docs;
};

struct JudgeVerdict {
    int label = 0;  // 1 correct, 0 incorrect
    std::string raw;
    bool warning = false;  // unparsable judge output mapped to 0
};

struct EvalReport {
    size_t n = 0;
    size_t correct = 0;
    double accuracy = 0.0;
    size_t skipped_lines = 0;
    nlohmann::json examples = nlohmann::json::array();

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["n"] = n;
        j["correct"] = correct;
        j["accuracy"] = accuracy;
        j["skipped_lines"] = skipped_lines;
        j["examples"] = examples;
        // reserved, unpopulated
        j["context_relevance"] = nullptr;
        j["faithfulness"] = nullptr;
        j["groundedness"] = nullptr;
        return j;
    }
};

inline JudgeVerdict judge_pair(LlmGateway& llm, const std::string& question,
                               const std::string& gold, const std::string& generated) {
    ChatRequest req;
    req.template_name = "judge";
    req.bindings = {{"question", question}, {"gold", gold}, {"generated", generated}};
    JudgeVerdict v;
    v.raw = llm.complete(req);
    for (const auto& tok : tokenize(v.raw)) {
        if (tok == "1" || tok == "true") {
            v.label = 1;
            return v;
        }
        if (tok == "0" || tok == "false") {
            v.label = 0;
            return v;
        }
    }
    v.label = 0;
    v.warning = true;
    return v;
}

// Dataset JSONL: {"question": str, "answer": str, "docs": [str]?} per line.
struct DatasetLoad {
    std::vector<QaExample> examples;
    size_t skipped_lines = 0;
};

inline DatasetLoad load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open dataset: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    DatasetLoad out;
    for (const auto& line : split_lines(ss.str())) {
        auto trimmed = trim_view(line);
        if (trimmed.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(trimmed, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("question") ||
            !j.contains("answer") || !j["question"].is_string() || !j["answer"].is_string() ||
            j["question"].get<std::string>().empty() || j["answer"].get<std::string>().empty()) {
            ++out.skipped_lines;
            continue;
        }
        QaExample ex;
        ex.question = j["question"].get<std::string>();
        ex.gold = j["answer"].get<std::string>();
        if (j.contains("docs") && j["docs"].is_array())
            for (const auto& d : j["docs"]) ex.docs.push_back(d.get<std::string>());
        out.examples.push_back(std::move(ex));
    }
    return out;
}

inline EvalReport evaluate_dataset(Pipeline& pipeline, LlmGateway& llm, const std::string& path,
                                   bool with_traces = false, int parallelism = 0) {
    DatasetLoad data = load_dataset(path);
    EvalReport report;
    report.skipped_lines = data.skipped_lines;
    report.n = data.examples.size();

    struct Row {
        nlohmann::json entry;
        int label = 0;
    };
    std::vector<size_t> indices(data.examples.size());
    for (size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    auto rows = detail::parallel_map(indices, parallelism, [&](size_t i) {
        const QaExample& ex = data.examples[i];
        AnswerResult result = pipeline.answer(ex.question);
        JudgeVerdict verdict = judge_pair(llm, ex.question, ex.gold, result.answer);
        Row row;
        row.label = verdict.label;
        row.entry["line"] = i + 1;
        row.entry["question"] = ex.question;
        row.entry["gold"] = ex.gold;
        row.entry["generated"] = result.answer;
        row.entry["label"] = verdict.label;
        row.entry["judge_raw"] = verdict.raw;
        row.entry["warning"] = verdict.warning;
        if (with_traces) row.entry["trace"] = std::move(result.trace);
        return row;
    });
    for (auto& row : rows) {
        report.correct += size_t(row.label);
        report.examples.push_back(std::move(row.entry));
    }
    report.accuracy = report.n == 0 ? 0.0 : double(report.correct) / double(report.n);
    return report;
}

}  // namespace graphmind

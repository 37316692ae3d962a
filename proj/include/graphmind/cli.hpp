#pragma once
// Command-line surface: memorize / ask / eval / stats.
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "graphmind/config.hpp"
#include "graphmind/httpbackend.hpp"
#include "graphmind/judge.hpp"
#include "graphmind/memorize.hpp"
#include "graphmind/qa.hpp"

namespace graphmind {

namespace cli {

struct CommonFlags {
    std::string config_path;
    bool no_enhance = false;
    std::string combo;
    std::string restriction;
};

inline AppConfig effective_config(const CommonFlags& flags) {
    AppConfig cfg;
    if (!flags.config_path.empty()) cfg = AppConfig::load(flags.config_path);
    cfg.apply_env();
    if (flags.no_enhance) cfg.pipeline.enable_plan_enhancement = false;
    if (!flags.combo.empty()) {
        auto combo = combo_from(flags.combo);
        if (!combo) throw Error(ErrorCode::ConfigError, "bad --combo value: " + flags.combo);
        cfg.pipeline.combo = *combo;
    }
    if (!flags.restriction.empty()) {
        if (flags.restriction == "all") cfg.pipeline.restriction = Restriction::all();
        else if (flags.restriction == "E") cfg.pipeline.restriction = Restriction::no_episodic();
        else throw Error(ErrorCode::ConfigError, "bad --restriction value (all or E)");
    }
    return cfg;
}

inline std::shared_ptr<LlmBackend> make_backend(const AppConfig& cfg) {
    if (cfg.backend_kind == "http")
        return std::make_shared<HttpBackend>(cfg.llm_url, cfg.llm_model);
    if (!cfg.fixture_path.empty())
        return std::make_shared<ScriptedBackend>(ScriptedBackend::from_jsonl(cfg.fixture_path));
    return std::make_shared<ScriptedBackend>();
}

struct Engine {
    MemoryGraph graph;
    std::shared_ptr<VecIndex> index;
    std::shared_ptr<LlmBackend> backend;
    std::shared_ptr<LlmGateway> llm;
};

inline Engine open_engine(const AppConfig& cfg, bool require_snapshot) {
    Engine e;
    if (std::filesystem::exists(cfg.snapshot_path)) {
        e.graph = MemoryGraph::load_snapshot(cfg.snapshot_path);
    } else if (require_snapshot) {
        throw Error(ErrorCode::IoError, "no snapshot at " + cfg.snapshot_path +
                                            " (run `graphmind memorize` first)");
    }
    e.index = std::make_shared<VecIndex>(std::make_shared<HashingEmbedder>());
    rebuild_index(e.graph, *e.index);
    e.backend = make_backend(cfg);
    e.llm = std::make_shared<LlmGateway>(e.backend, cfg.cache_path);
    return e;
}

inline int cmd_memorize(const AppConfig& cfg, const std::string& corpus_path, std::ostream& out,
                        std::ostream& err) {
    try {
        Engine e = open_engine(cfg, false);
        CorpusLoad corpus = load_corpus(corpus_path);
        Memorizer memorizer(e.graph, *e.index, *e.llm);
        IngestReport total;
        for (const auto& doc : corpus.docs) {
            IngestReport r = memorizer.memorize_document(doc);
            for (const auto& [k, v] : r.new_vertices) total.new_vertices[k] += v;
            for (const auto& [k, v] : r.new_edges) total.new_edges[k] += v;
            total.skipped_triples += r.skipped_triples;
            if (r.parse_failed) total.parse_failed = true;
        }
        e.graph.save_snapshot(cfg.snapshot_path);
        out << "documents: " << corpus.docs.size() << " (skipped lines: " << corpus.skipped_lines
            << ")\n";
        out << "new vertices:";
        for (const auto& [k, v] : total.new_vertices) out << " " << k << "=" << v;
        out << "\nnew edges:";
        for (const auto& [k, v] : total.new_edges) out << " " << k << "=" << v;
        out << "\nskipped triples: " << total.skipped_triples << "\n";
        out << "snapshot: " << cfg.snapshot_path << "\n";
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

inline int cmd_ask(const AppConfig& cfg, const std::string& question,
                   const std::string& trace_path, std::ostream& out, std::ostream& err) {
    try {
        Engine e = open_engine(cfg, true);
        PipelineConfig pc = cfg.pipeline;
        pc.parallelism = cfg.parallelism;
        Pipeline pipeline(e.graph, *e.index, *e.llm, pc);
        AnswerResult result = pipeline.answer(question);
        if (!trace_path.empty()) {
            std::ofstream tf(trace_path, std::ios::trunc);
            if (!tf) throw Error(ErrorCode::IoError, "cannot write trace: " + trace_path);
            tf << result.trace.dump(2) << "\n";
        }
        out << result.answer << "\n";
        return 0;
    } catch (const PipelineError& e) {
        err << "error: " << e.what() << "\n";
        if (!trace_path.empty()) {
            std::ofstream tf(trace_path, std::ios::trunc);
            if (tf) tf << e.partial_trace().dump(2) << "\n";
        }
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

inline int cmd_eval(const AppConfig& cfg, const std::string& dataset_path, bool with_traces,
                    const std::string& out_path, std::ostream& out, std::ostream& err) {
    try {
        Engine e = open_engine(cfg, true);
        PipelineConfig pc = cfg.pipeline;
        pc.parallelism = cfg.parallelism;
        Pipeline pipeline(e.graph, *e.index, *e.llm, pc);
        EvalReport report =
            evaluate_dataset(pipeline, *e.llm, dataset_path, with_traces, cfg.parallelism);
        std::string body = report.to_json().dump(2) + "\n";
        if (out_path.empty()) {
            out << body;
        } else {
            std::ofstream f(out_path, std::ios::trunc);
            if (!f) throw Error(ErrorCode::IoError, "cannot write report: " + out_path);
            f << body;
        }
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

inline int cmd_stats(const AppConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (!std::filesystem::exists(cfg.snapshot_path))
            throw Error(ErrorCode::IoError, "no snapshot at " + cfg.snapshot_path);
        MemoryGraph graph = MemoryGraph::load_snapshot(cfg.snapshot_path);
        GraphStats s = graph.stats();
        out << "vertices\n";
        for (const char* kind : {"Object", "Thesis", "Episodic"})
            out << "  " << std::left << std::setw(14) << kind << s.vertex_counts.at(kind) << "\n";
        out << "edges\n";
        for (const char* kind : {"Simple", "HyperEpisodic", "HyperThesis"})
            out << "  " << std::left << std::setw(14) << kind << s.edge_counts.at(kind) << "\n";
        out << "neighbor degrees (source->target: mean / std)\n";
        for (const char* src : {"Object", "Thesis", "Episodic"})
            for (const char* dst : {"Object", "Thesis", "Episodic"}) {
                std::string key = std::string(src) + "->" + dst;
                const DegreeMoments& m = s.neighbor_degrees.at(key);
                out << "  " << std::left << std::setw(20) << key << std::fixed
                    << std::setprecision(2) << m.mean << " / " << m.stddev << "\n";
            }
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace cli

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"graphmind: knowledge-graph memory with plan-driven QA"};
    app.require_subcommand(1);

    cli::CommonFlags flags;
    std::string corpus_path, question, dataset_path, trace_path, out_path;
    bool eval_traces = false;

    app.add_option("--config", flags.config_path, "config file path");

    auto* memorize = app.add_subcommand("memorize", "ingest a JSONL corpus into the graph");
    memorize->add_option("corpus", corpus_path, "corpus JSONL path")->required();

    auto* ask = app.add_subcommand("ask", "answer a question from the memory graph");
    ask->add_option("question", question, "the question")->required();
    ask->add_option("--trace", trace_path, "write the full answer trace JSON here");
    ask->add_flag("--no-enhance", flags.no_enhance, "disable search-plan enhancement");
    ask->add_option("--combo", flags.combo, "retrieval combo: BS_WC, BS_NR or NR_only");
    ask->add_option("--restriction", flags.restriction, "traversal restriction: all or E");

    auto* eval = app.add_subcommand("eval", "evaluate a JSONL dataset with the LLM judge");
    eval->add_option("dataset", dataset_path, "dataset JSONL path")->required();
    eval->add_flag("--trace", eval_traces, "include pipeline traces in the report");
    eval->add_option("--out", out_path, "write the report here instead of stdout");
    eval->add_flag("--no-enhance", flags.no_enhance, "disable search-plan enhancement");
    eval->add_option("--combo", flags.combo, "retrieval combo: BS_WC, BS_NR or NR_only");
    eval->add_option("--restriction", flags.restriction, "traversal restriction: all or E");

    auto* stats = app.add_subcommand("stats", "print graph statistics");
    (void)stats;

    std::vector<const char*> argv;
    argv.push_back("graphmind");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    AppConfig cfg;
    try {
        cfg = cli::effective_config(flags);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::ConfigError ? 2 : 1;
    }

    if (app.got_subcommand("memorize")) return cli::cmd_memorize(cfg, corpus_path, out, err);
    if (app.got_subcommand("ask")) return cli::cmd_ask(cfg, question, trace_path, out, err);
    if (app.got_subcommand("eval"))
        return cli::cmd_eval(cfg, dataset_path, eval_traces, out_path, out, err);
    if (app.got_subcommand("stats")) return cli::cmd_stats(cfg, out, err);
    err << "no subcommand\n";
    return 2;
}

}  // namespace graphmind

#pragma once
// Application config: one human-editable key-tree file with sections
// mirroring the module names. Parsing rejects unknown sections and keys;
// serialize() emits a canonical form so load(serialize(cfg)) == cfg.
//
// Env vars GRAPHMIND_LLM_URL, GRAPHMIND_LLM_MODEL and GRAPHMIND_CACHE_PATH
// override the corresponding file values.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "graphmind/errors.hpp"
#include "graphmind/qa.hpp"
#include "graphmind/traverse.hpp"
#include "graphmind/util.hpp"

namespace graphmind {

struct AppConfig {
    std::string snapshot_path = "graphmind.snap";
    std::string cache_path;
    int parallelism = 0;

    std::string backend_kind = "scripted";  // scripted | http
    std::string fixture_path;
    std::string llm_url = "http://localhost:11434/api/chat";
    std::string llm_model = "qwen2.5:7b";

    PipelineConfig pipeline;

    bool operator==(const AppConfig&) const = default;

    static AppConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::IoError, "cannot open config: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str());
    }

    static AppConfig parse(const std::string& text) {
        AppConfig cfg;
        std::string section;
        size_t line_no = 0;
        for (const auto& raw : split_lines(text)) {
            ++line_no;
            std::string line = trim(raw);
            size_t hash = line.find('#');
            if (hash != std::string::npos) line = trim(line.substr(0, hash));
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw Error(ErrorCode::ConfigError,
                                "bad section at line " + std::to_string(line_no));
                section = trim(line.substr(1, line.size() - 2));
                if (section != "app" && section != "backend" && section != "pipeline" &&
                    section != "beam" && section != "water" && section != "naive")
                    throw Error(ErrorCode::ConfigError, "unknown section [" + section + "]");
                continue;
            }
            size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw Error(ErrorCode::ConfigError, "expected key = value at line " +
                                                        std::to_string(line_no));
            std::string key = trim(line.substr(0, eq));
            std::string value = trim(line.substr(eq + 1));
            cfg.set(section, key, value);
        }
        return cfg;
    }

    void apply_env() {
        if (const char* url = std::getenv("GRAPHMIND_LLM_URL")) {
            llm_url = url;
            backend_kind = "http";
        }
        if (const char* model = std::getenv("GRAPHMIND_LLM_MODEL")) llm_model = model;
        if (const char* cache = std::getenv("GRAPHMIND_CACHE_PATH")) cache_path = cache;
    }

    std::string serialize() const {
        std::ostringstream out;
        out << "[app]\n";
        out << "snapshot = " << snapshot_path << "\n";
        out << "cache = " << cache_path << "\n";
        out << "parallelism = " << parallelism << "\n\n";

        out << "[backend]\n";
        out << "kind = " << backend_kind << "\n";
        out << "fixture = " << fixture_path << "\n";
        out << "url = " << llm_url << "\n";
        out << "model = " << llm_model << "\n\n";

        out << "[pipeline]\n";
        out << "max_steps = " << pipeline.max_steps << "\n";
        out << "max_clue_queries = " << pipeline.max_clue_queries << "\n";
        out << "max_vertex_matches = " << pipeline.max_vertex_matches << "\n";
        out << "max_filtered_triples = " << pipeline.max_filtered_triples << "\n";
        out << "preprocess = " << fmt_bool(pipeline.enable_preprocess) << "\n";
        out << "plan_enhancement = " << fmt_bool(pipeline.enable_plan_enhancement) << "\n";
        out << "combo = " << combo_name(pipeline.combo) << "\n";
        out << "restriction = "
            << (pipeline.restriction == Restriction::no_episodic() ? "E" : "all") << "\n";
        out << "answer_triples = " << fmt_edge_kinds(pipeline.accepted_answer_edge_kinds) << "\n\n";

        const BeamConfig& b = pipeline.traversal.beam;
        out << "[beam]\n";
        out << "max_depth = " << b.max_depth << "\n";
        out << "max_paths = " << b.max_paths << "\n";
        out << "same_path_intersection_by_node = " << fmt_bool(b.same_path_intersection_by_node)
            << "\n";
        out << "diff_paths_intersection_by_node = " << fmt_bool(b.diff_paths_intersection_by_node)
            << "\n";
        out << "diff_paths_intersection_by_rel = " << fmt_bool(b.diff_paths_intersection_by_rel)
            << "\n";
        out << "mean_alpha = " << fmt_real(b.mean_alpha) << "\n";
        out << "final_sorting_mode = " << fmt_sort_mode(b.final_sorting_mode) << "\n";
        out << "rerank_threshold = " << fmt_real(b.rerank.threshold) << "\n";
        out << "rerank_fetch_n = " << b.rerank.fetch_n << "\n\n";

        const WaterConfig& w = pipeline.traversal.water;
        out << "[water]\n";
        out << "strict_filter = " << fmt_bool(w.strict_filter) << "\n";
        out << "hyper_num = " << w.hyper_num << "\n";
        out << "episodic_num = " << w.episodic_num << "\n";
        out << "chain_triplets_num = " << w.chain_triplets_num << "\n";
        out << "other_triplets_num = " << w.other_triplets_num << "\n";
        out << "do_text_pruning = " << fmt_bool(w.do_text_pruning) << "\n\n";

        const NaiveConfig& n = pipeline.traversal.naive;
        out << "[naive]\n";
        out << "max_k = " << n.max_k << "\n";
        out << "rerank_threshold = " << fmt_real(n.rerank.threshold) << "\n";
        out << "rerank_fetch_n = " << n.rerank.fetch_n << "\n";
        return out.str();
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write config: " + path);
        out << serialize();
    }

private:
    static std::string fmt_bool(bool v) { return v ? "true" : "false"; }

    static std::string fmt_real(double v) {
        std::ostringstream os;
        os << std::setprecision(17) << v;
        return os.str();
    }

    static std::string fmt_sort_mode(FinalSortMode m) {
        switch (m) {
            case FinalSortMode::Mixed: return "mixed";
            case FinalSortMode::Score: return "score";
            case FinalSortMode::Depth: return "depth";
        }
        return "mixed";
    }

    static std::string fmt_edge_kinds(const std::set<EdgeKind>& kinds) {
        std::string out;
        auto append = [&](const char* name) {
            if (!out.empty()) out += ",";
            out += name;
        };
        if (kinds.count(EdgeKind::Simple)) append("simple");
        if (kinds.count(EdgeKind::HyperEpisodic)) append("episodic");
        if (kinds.count(EdgeKind::HyperThesis)) append("hyper");
        return out;
    }

    static bool parse_bool_value(const std::string& v, const std::string& key) {
        if (v == "true") return true;
        if (v == "false") return false;
        throw Error(ErrorCode::ConfigError, key + " expects true/false, got: " + v);
    }

    static int parse_int_value(const std::string& v, const std::string& key) {
        try {
            size_t pos = 0;
            int out = std::stoi(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return out;
        } catch (const std::exception&) {
            throw Error(ErrorCode::ConfigError, key + " expects an integer, got: " + v);
        }
    }

    static double parse_real_value(const std::string& v, const std::string& key) {
        try {
            size_t pos = 0;
            double out = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return out;
        } catch (const std::exception&) {
            throw Error(ErrorCode::ConfigError, key + " expects a number, got: " + v);
        }
    }

    void set(const std::string& section, const std::string& key, const std::string& value) {
        auto unknown = [&]() -> Error {
            return Error(ErrorCode::ConfigError, "unknown key " + key + " in [" + section + "]");
        };
        if (section == "app") {
            if (key == "snapshot") snapshot_path = value;
            else if (key == "cache") cache_path = value;
            else if (key == "parallelism") parallelism = parse_int_value(value, key);
            else throw unknown();
        } else if (section == "backend") {
            if (key == "kind") {
                if (value != "scripted" && value != "http")
                    throw Error(ErrorCode::ConfigError, "backend kind must be scripted or http");
                backend_kind = value;
            } else if (key == "fixture") fixture_path = value;
            else if (key == "url") llm_url = value;
            else if (key == "model") llm_model = value;
            else throw unknown();
        } else if (section == "pipeline") {
            if (key == "max_steps") pipeline.max_steps = parse_int_value(value, key);
            else if (key == "max_clue_queries")
                pipeline.max_clue_queries = parse_int_value(value, key);
            else if (key == "max_vertex_matches")
                pipeline.max_vertex_matches = parse_int_value(value, key);
            else if (key == "max_filtered_triples")
                pipeline.max_filtered_triples = parse_int_value(value, key);
            else if (key == "preprocess")
                pipeline.enable_preprocess = parse_bool_value(value, key);
            else if (key == "plan_enhancement")
                pipeline.enable_plan_enhancement = parse_bool_value(value, key);
            else if (key == "combo") {
                auto combo = combo_from(value);
                if (!combo)
                    throw Error(ErrorCode::ConfigError, "combo must be BS_WC, BS_NR or NR_only");
                pipeline.combo = *combo;
            } else if (key == "restriction") {
                if (value == "all") pipeline.restriction = Restriction::all();
                else if (value == "E") pipeline.restriction = Restriction::no_episodic();
                else throw Error(ErrorCode::ConfigError, "restriction must be all or E");
            } else if (key == "answer_triples") {
                std::set<EdgeKind> kinds;
                std::istringstream ss(value);
                std::string part;
                while (std::getline(ss, part, ',')) {
                    part = trim(part);
                    if (part == "simple") kinds.insert(EdgeKind::Simple);
                    else if (part == "hyper") kinds.insert(EdgeKind::HyperThesis);
                    else if (part == "episodic") kinds.insert(EdgeKind::HyperEpisodic);
                    else if (!part.empty())
                        throw Error(ErrorCode::ConfigError, "unknown triple kind: " + part);
                }
                pipeline.accepted_answer_edge_kinds = std::move(kinds);
            } else throw unknown();
        } else if (section == "beam") {
            BeamConfig& b = pipeline.traversal.beam;
            if (key == "max_depth") b.max_depth = parse_int_value(value, key);
            else if (key == "max_paths") b.max_paths = parse_int_value(value, key);
            else if (key == "same_path_intersection_by_node")
                b.same_path_intersection_by_node = parse_bool_value(value, key);
            else if (key == "diff_paths_intersection_by_node")
                b.diff_paths_intersection_by_node = parse_bool_value(value, key);
            else if (key == "diff_paths_intersection_by_rel")
                b.diff_paths_intersection_by_rel = parse_bool_value(value, key);
            else if (key == "mean_alpha") b.mean_alpha = parse_real_value(value, key);
            else if (key == "final_sorting_mode") {
                if (value == "mixed") b.final_sorting_mode = FinalSortMode::Mixed;
                else if (value == "score") b.final_sorting_mode = FinalSortMode::Score;
                else if (value == "depth") b.final_sorting_mode = FinalSortMode::Depth;
                else throw Error(ErrorCode::ConfigError, "final_sorting_mode: " + value);
            } else if (key == "rerank_threshold")
                b.rerank.threshold = parse_real_value(value, key);
            else if (key == "rerank_fetch_n") b.rerank.fetch_n = parse_int_value(value, key);
            else throw unknown();
        } else if (section == "water") {
            WaterConfig& w = pipeline.traversal.water;
            if (key == "strict_filter") w.strict_filter = parse_bool_value(value, key);
            else if (key == "hyper_num") w.hyper_num = parse_int_value(value, key);
            else if (key == "episodic_num") w.episodic_num = parse_int_value(value, key);
            else if (key == "chain_triplets_num")
                w.chain_triplets_num = parse_int_value(value, key);
            else if (key == "other_triplets_num")
                w.other_triplets_num = parse_int_value(value, key);
            else if (key == "do_text_pruning") w.do_text_pruning = parse_bool_value(value, key);
            else throw unknown();
        } else if (section == "naive") {
            NaiveConfig& n = pipeline.traversal.naive;
            if (key == "max_k") n.max_k = parse_int_value(value, key);
            else if (key == "rerank_threshold") n.rerank.threshold = parse_real_value(value, key);
            else if (key == "rerank_fetch_n") n.rerank.fetch_n = parse_int_value(value, key);
            else throw unknown();
        } else {
            throw Error(ErrorCode::ConfigError, "key outside any section: " + key);
        }
    }
};

}  // namespace graphmind

#pragma once
// Document ingestion: one document becomes one Episodic vertex, LLM-extracted
// thesis and simple triples, hyper-links from everything extracted back to the
// source, and index updates for the new texts.
//
// Hard backend errors abort before the graph is touched; malformed or
// kind-crossing triples degrade to skip counts.

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphmind/llmio.hpp"
#include "graphmind/memgraph.hpp"
#include "graphmind/traverse.hpp"
#include "graphmind/vecindex.hpp"

namespace graphmind {

// Fixed marker predicates for the two hyper-edge kinds.
inline const char* kHyperEpisodicPredicate = "mentioned in";
inline const char* kHyperThesisPredicate = "described by";

struct Document {
    std::string doc_id;
    std::string text;
    Attrs meta;
};

struct IngestReport {
    std::map<std::string, uint64_t> new_vertices;  // keyed by vertex kind name
    std::map<std::string, uint64_t> new_edges;     // keyed by edge kind name
    uint64_t skipped_triples = 0;
    bool parse_failed = false;

    uint64_t total_new() const {
        uint64_t n = 0;
        for (const auto& [k, v] : new_vertices) n += v;
        for (const auto& [k, v] : new_edges) n += v;
        return n;
    }
};

struct CorpusLoad {
    std::vector<Document> docs;
    size_t skipped_lines = 0;
};

// JSONL corpus: {"doc_id": str, "text": str, "meta": object} per line.
inline CorpusLoad load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open corpus: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    CorpusLoad out;
    for (const auto& line : split_lines(ss.str())) {
        auto trimmed = trim_view(line);
        if (trimmed.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(trimmed, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("doc_id") || !j.contains("text") ||
            !j["doc_id"].is_string() || !j["text"].is_string() ||
            j["text"].get<std::string>().empty()) {
            ++out.skipped_lines;
            continue;
        }
        Document d;
        d.doc_id = j["doc_id"].get<std::string>();
        d.text = j["text"].get<std::string>();
        if (j.contains("meta") && j["meta"].is_object())
            for (auto& [k, v] : j["meta"].items())
                d.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
        out.docs.push_back(std::move(d));
    }
    return out;
}

class Memorizer {
public:
    Memorizer(MemoryGraph& graph, VecIndex& index, LlmGateway& llm)
        : graph_(graph), index_(index), llm_(llm) {}

    // (entity, marker, thesis statement) rows plus malformed-line count.
    ParsedTriples extract_thesis_triples(const Document& doc) const {
        ChatRequest req;
        req.template_name = "thesis_extract";
        req.bindings["document"] = doc.text;
        return parse_triples(llm_.complete(req));
    }

    ParsedTriples extract_simple_triples(const Document& doc) const {
        ChatRequest req;
        req.template_name = "simple_extract";
        req.bindings["document"] = doc.text;
        return parse_triples(llm_.complete(req));
    }

    IngestReport memorize_document(const Document& doc) {
        if (trim_view(doc.text).empty())
            throw Error(ErrorCode::EmptyText, "document " + doc.doc_id);

        // both extractions run before any mutation so a backend failure
        // leaves the graph untouched
        ParsedTriples thesis = extract_thesis_triples(doc);
        ParsedTriples simple = extract_simple_triples(doc);

        IngestReport report;
        report.skipped_triples = thesis.skipped + simple.skipped;
        size_t accepted = thesis.triples.size() + simple.triples.size();
        report.parse_failed = accepted == 0 && report.skipped_triples > 0;

        auto vertices_before = graph_.vertex_kind_counts();
        auto edges_before = graph_.edge_kind_counts();

        Attrs doc_attrs = doc.meta;
        doc_attrs["doc_id"] = doc.doc_id;
        VertexId episodic = graph_.upsert_vertex(VertexKind::Episodic, doc.text, doc_attrs);

        std::set<uint64_t> touched_objects;
        std::set<uint64_t> touched_theses;
        std::vector<uint64_t> touched_edges;

        for (const auto& [s, p, o] : simple.triples) {
            try {
                auto res = graph_.upsert_triple(s, p, o, EdgeKind::Simple);
                touched_edges.push_back(res.edge_id);
                if (!res.created) ++report.skipped_triples;
                touched_objects.insert(graph_.find_vertex(VertexKind::Object, s)->value);
                touched_objects.insert(graph_.find_vertex(VertexKind::Object, o)->value);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::KindMismatch && e.code() != ErrorCode::EmptyText) throw;
                ++report.skipped_triples;
            }
        }
        for (const auto& [entity, marker, statement] : thesis.triples) {
            try {
                auto res = graph_.upsert_triple(entity, marker, statement, EdgeKind::HyperThesis);
                touched_edges.push_back(res.edge_id);
                if (!res.created) ++report.skipped_triples;
                touched_objects.insert(graph_.find_vertex(VertexKind::Object, entity)->value);
                touched_theses.insert(graph_.find_vertex(VertexKind::Thesis, statement)->value);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::KindMismatch && e.code() != ErrorCode::EmptyText) throw;
                ++report.skipped_triples;
            }
        }

        for (uint64_t oid : touched_objects)
            touched_edges.push_back(graph_
                                        .upsert_edge(VertexId{oid}, episodic,
                                                     EdgeKind::HyperEpisodic,
                                                     kHyperEpisodicPredicate)
                                        .edge_id);
        for (uint64_t tid : touched_theses)
            touched_edges.push_back(graph_
                                        .upsert_edge(VertexId{tid}, episodic,
                                                     EdgeKind::HyperEpisodic,
                                                     kHyperEpisodicPredicate)
                                        .edge_id);

        auto vertices_after = graph_.vertex_kind_counts();
        auto edges_after = graph_.edge_kind_counts();
        for (const auto& [kind, n] : vertices_after)
            report.new_vertices[kind] = n - vertices_before[kind];
        for (const auto& [kind, n] : edges_after)
            report.new_edges[kind] = n - edges_before[kind];

        for (uint64_t oid : touched_objects)
            index_.index_text(kObjectsNamespace, std::to_string(oid),
                              graph_.vertex(VertexId{oid})->text);
        for (uint64_t eid : touched_edges)
            index_.index_text(kTriplesNamespace, std::to_string(eid),
                              graph_.triple_for_edge(eid).render());
        return report;
    }

private:
    MemoryGraph& graph_;
    VecIndex& index_;
    LlmGateway& llm_;
};

// Rebuilds both namespaces from a loaded snapshot.
inline void rebuild_index(const MemoryGraph& graph, VecIndex& index) {
    for (uint64_t vid : graph.vertex_ids()) {
        auto v = graph.vertex(VertexId{vid});
        if (v->kind == VertexKind::Object)
            index.index_text(kObjectsNamespace, std::to_string(vid), v->text);
    }
    for (uint64_t eid : graph.edge_ids())
        index.index_text(kTriplesNamespace, std::to_string(eid),
                         graph.triple_for_edge(eid).render());
}

}  // namespace graphmind

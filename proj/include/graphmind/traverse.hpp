#pragma once
// Graph retrieval: NaiveRetriever (flat vector lookup), BeamSearch (bounded
// best-first path expansion), WaterCircles (ring expansion with per-bucket
// quotas), and the hybrid combinator. Defaults mirror the fixed retrieval
// hyperparameters; every retriever is read-only and deterministic, with ties
// broken by (similarity desc, triple rendering asc).

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "graphmind/embedder.hpp"
#include "graphmind/errors.hpp"
#include "graphmind/memgraph.hpp"
#include "graphmind/vecindex.hpp"

namespace graphmind {

constexpr const char* kObjectsNamespace = "objects";
constexpr const char* kTriplesNamespace = "triples";

struct RerankConfig {
    double threshold = 0.5;
    int fetch_n = 25;

    bool operator==(const RerankConfig&) const = default;
};

enum class FinalSortMode { Mixed, Score, Depth };

struct BeamConfig {
    int max_depth = 5;
    int max_paths = 10;
    bool same_path_intersection_by_node = false;   // false: a path never revisits a vertex
    bool diff_paths_intersection_by_node = false;  // false: paths share no non-start vertex
    bool diff_paths_intersection_by_rel = false;   // false: paths share no predicate text
    double mean_alpha = 0.75;
    FinalSortMode final_sorting_mode = FinalSortMode::Mixed;
    RerankConfig rerank{0.5, 25};

    bool operator==(const BeamConfig&) const = default;
};

struct WaterConfig {
    bool strict_filter = true;
    int hyper_num = 15;            // hyper-thesis bucket cap
    int episodic_num = 15;         // hyper-episodic bucket cap
    int chain_triplets_num = 25;   // chain bucket cap
    int other_triplets_num = 6;    // remaining simple triples
    bool do_text_pruning = false;  // true: token test also on start-incident triples
    int max_radius = 5;

    bool operator==(const WaterConfig&) const = default;
};

struct NaiveConfig {
    int max_k = 50;
    RerankConfig rerank{0.5, 50};

    bool operator==(const NaiveConfig&) const = default;
};

struct Restriction {
    std::set<VertexKind> accepted = all_vertex_kinds();

    static Restriction all() { return {}; }
    // "E": episodic vertices excluded from traversal.
    static Restriction no_episodic() {
        return {{VertexKind::Object, VertexKind::Thesis}};
    }
    bool operator==(const Restriction&) const = default;
    bool allows(const Triple& t) const {
        for (VertexKind k : t.incident_kinds)
            if (!accepted.count(k)) return false;
        return true;
    }
};

enum class Combo { BeamWater, BeamNaive, NaiveOnly };

inline const char* combo_name(Combo c) {
    switch (c) {
        case Combo::BeamWater: return "BS_WC";
        case Combo::BeamNaive: return "BS_NR";
        case Combo::NaiveOnly: return "NR_only";
    }
    return "?";
}

inline std::optional<Combo> combo_from(std::string_view s) {
    if (s == "BS_WC") return Combo::BeamWater;
    if (s == "BS_NR") return Combo::BeamNaive;
    if (s == "NR_only") return Combo::NaiveOnly;
    return std::nullopt;
}

struct TraversalConfigs {
    BeamConfig beam;
    WaterConfig water;
    NaiveConfig naive;

    bool operator==(const TraversalConfigs&) const = default;
};

// Scores triples against one query, reusing embeddings the index already
// holds for indexed renderings and memoizing the rest.
class TripleScorer {
public:
    TripleScorer(const VecIndex& index, std::string_view query)
        : index_(index), query_(index.embedder().embed(query)) {}

    double score(const Triple& t) const {
        auto it = memo_.find(t.source_edge);
        if (it != memo_.end()) return it->second;
        double s;
        if (const Embedding* e = index_.stored_embedding(kTriplesNamespace,
                                                         std::to_string(t.source_edge))) {
            s = cosine(query_, *e);
        } else {
            s = cosine(query_, index_.embedder().embed(t.render()));
        }
        memo_.emplace(t.source_edge, s);
        return s;
    }

private:
    const VecIndex& index_;
    Embedding query_;
    mutable std::unordered_map<uint64_t, double> memo_;
};

namespace detail {

inline void sort_by_similarity(std::vector<Triple>& triples, const TripleScorer& scorer) {
    std::stable_sort(triples.begin(), triples.end(), [&](const Triple& a, const Triple& b) {
        double sa = scorer.score(a), sb = scorer.score(b);
        if (sa != sb) return sa > sb;
        return a.render() < b.render();
    });
}

inline void dedup_by_rendering(std::vector<Triple>& triples) {
    std::unordered_set<std::string> seen;
    std::vector<Triple> out;
    out.reserve(triples.size());
    for (auto& t : triples)
        if (seen.insert(t.render()).second) out.push_back(std::move(t));
    triples = std::move(out);
}

// single_step rerank: similarity threshold, similarity order, fetch_n cut.
inline std::vector<Triple> rerank_single_step(std::vector<Triple> triples,
                                              const TripleScorer& scorer,
                                              const RerankConfig& cfg) {
    std::vector<Triple> kept;
    kept.reserve(triples.size());
    for (auto& t : triples)
        if (scorer.score(t) >= cfg.threshold) kept.push_back(std::move(t));
    sort_by_similarity(kept, scorer);
    if (kept.size() > size_t(cfg.fetch_n)) kept.resize(size_t(cfg.fetch_n));
    return kept;
}

inline void require_starts(const MemoryGraph& g, const std::vector<VertexId>& starts) {
    if (starts.empty()) throw Error(ErrorCode::UnknownVertex, "no start vertices");
    for (VertexId v : starts)
        if (!g.vertex(v))
            throw Error(ErrorCode::UnknownVertex, "vertex " + std::to_string(v.value));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// NaiveRetriever: flat dense retrieval over triple renderings.
// ---------------------------------------------------------------------------

inline std::vector<Triple> naive_retrieve(const MemoryGraph& graph, const VecIndex& index,
                                          std::string_view query, const NaiveConfig& cfg,
                                          const Restriction& restriction = {}) {
    if (!index.has_namespace(kTriplesNamespace))
        throw Error(ErrorCode::EmptyIndex, kTriplesNamespace);
    auto hits = index.dense_search(kTriplesNamespace, query, size_t(cfg.rerank.fetch_n));
    std::vector<Triple> out;
    out.reserve(hits.size());
    for (const auto& hit : hits) {
        if (hit.score < cfg.rerank.threshold) continue;
        Triple t = graph.triple_for_edge(std::stoull(hit.doc_id));
        if (restriction.allows(t)) out.push_back(std::move(t));
        if (out.size() == size_t(cfg.max_k)) break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// BeamSearch
// ---------------------------------------------------------------------------

inline std::vector<Triple> beam_search(const MemoryGraph& graph, const VecIndex& index,
                                       std::string_view query,
                                       const std::vector<VertexId>& start_vertices,
                                       const BeamConfig& cfg,
                                       const Restriction& restriction = {}) {
    detail::require_starts(graph, start_vertices);
    if (!index.has_namespace(kTriplesNamespace))
        throw Error(ErrorCode::EmptyIndex, kTriplesNamespace);
    TripleScorer scorer(index, query);

    struct Path {
        std::vector<Triple> triples;
        std::vector<uint64_t> vertices;  // visit order, starting vertex first
        std::set<uint64_t> vertex_set;
        std::set<std::string> predicates;
        double score = 0.0;
        bool finished = false;
    };

    std::set<uint64_t> start_set;
    std::vector<Path> beam;
    for (VertexId s : start_vertices) {
        if (!start_set.insert(s.value).second) continue;
        Path p;
        p.vertices.push_back(s.value);
        p.vertex_set.insert(s.value);
        beam.push_back(std::move(p));
    }
    std::sort(beam.begin(), beam.end(),
              [](const Path& a, const Path& b) { return a.vertices[0] < b.vertices[0]; });
    if (beam.size() > size_t(cfg.max_paths)) beam.resize(size_t(cfg.max_paths));

    for (int depth = 0; depth < cfg.max_depth; ++depth) {
        std::vector<Path> pool;
        bool extended = false;
        for (const Path& p : beam) {
            if (p.finished) {
                pool.push_back(p);
                continue;
            }
            uint64_t head = p.vertices.back();
            auto incident = graph.incident_triples(VertexId{head}, restriction.accepted);
            size_t before = pool.size();
            for (const Triple& t : incident) {
                auto e = graph.edge_ref(t.source_edge);
                uint64_t other = (e.src.value == head) ? e.dst.value : e.src.value;
                if (!cfg.same_path_intersection_by_node && p.vertex_set.count(other)) continue;
                Path np = p;
                double es = scorer.score(t);
                np.score = np.triples.empty()
                               ? es
                               : cfg.mean_alpha * np.score + (1.0 - cfg.mean_alpha) * es;
                np.triples.push_back(t);
                np.vertices.push_back(other);
                np.vertex_set.insert(other);
                np.predicates.insert(t.predicate_text);
                pool.push_back(std::move(np));
            }
            if (pool.size() == before) {
                Path dead = p;
                dead.finished = true;
                pool.push_back(std::move(dead));
            } else {
                extended = true;
            }
        }
        if (!extended) {
            beam = std::move(pool);
            break;
        }

        // rank the whole pool, then pick greedily under the cross-path
        // intersection constraints
        std::sort(pool.begin(), pool.end(), [](const Path& a, const Path& b) {
            if (a.score != b.score) return a.score > b.score;
            if (a.vertices.size() != b.vertices.size())
                return a.vertices.size() < b.vertices.size();
            return a.vertices < b.vertices;
        });
        std::vector<Path> selected;
        std::set<uint64_t> used_vertices;
        std::set<std::string> used_predicates;
        for (Path& cand : pool) {
            if (selected.size() == size_t(cfg.max_paths)) break;
            if (!cfg.diff_paths_intersection_by_node) {
                bool clash = false;
                for (uint64_t v : cand.vertex_set)
                    if (!start_set.count(v) && used_vertices.count(v)) clash = true;
                if (clash) continue;
            }
            if (!cfg.diff_paths_intersection_by_rel) {
                bool clash = false;
                for (const auto& pr : cand.predicates)
                    if (used_predicates.count(pr)) clash = true;
                if (clash) continue;
            }
            for (uint64_t v : cand.vertex_set)
                if (!start_set.count(v)) used_vertices.insert(v);
            for (const auto& pr : cand.predicates) used_predicates.insert(pr);
            selected.push_back(std::move(cand));
        }
        beam = std::move(selected);
        if (beam.empty()) break;
    }

    // order retained paths per final_sorting_mode, then flatten
    std::vector<const Path*> by_score, by_depth;
    for (const Path& p : beam) {
        if (p.triples.empty()) continue;
        by_score.push_back(&p);
        by_depth.push_back(&p);
    }
    auto score_cmp = [](const Path* a, const Path* b) {
        if (a->score != b->score) return a->score > b->score;
        if (a->triples.size() != b->triples.size()) return a->triples.size() < b->triples.size();
        return a->vertices < b->vertices;
    };
    auto depth_cmp = [](const Path* a, const Path* b) {
        if (a->triples.size() != b->triples.size()) return a->triples.size() < b->triples.size();
        if (a->score != b->score) return a->score > b->score;
        return a->vertices < b->vertices;
    };
    std::sort(by_score.begin(), by_score.end(), score_cmp);
    std::sort(by_depth.begin(), by_depth.end(), depth_cmp);

    std::vector<const Path*> ordered;
    std::set<const Path*> taken;
    auto take = [&](const Path* p) {
        if (taken.insert(p).second) ordered.push_back(p);
    };
    switch (cfg.final_sorting_mode) {
        case FinalSortMode::Score:
            for (auto* p : by_score) take(p);
            break;
        case FinalSortMode::Depth:
            for (auto* p : by_depth) take(p);
            break;
        case FinalSortMode::Mixed:
            for (size_t i = 0; i < by_score.size(); ++i) {
                take(by_score[i]);
                take(by_depth[i]);
            }
            break;
    }

    std::vector<Triple> flat;
    for (const Path* p : ordered)
        for (const Triple& t : p->triples) flat.push_back(t);
    detail::dedup_by_rendering(flat);
    return detail::rerank_single_step(std::move(flat), scorer, cfg.rerank);
}

// ---------------------------------------------------------------------------
// WaterCircles
// ---------------------------------------------------------------------------

struct WaterResult {
    std::vector<Triple> chain;     // on shortest paths between two start vertices
    std::vector<Triple> episodic;  // hyper (to episodic)
    std::vector<Triple> hyper;     // hyper (to thesis)
    std::vector<Triple> other;     // remaining simple triples

    std::vector<Triple> all() const {
        std::vector<Triple> out;
        out.reserve(chain.size() + episodic.size() + hyper.size() + other.size());
        for (const auto* bucket : {&chain, &episodic, &hyper, &other})
            out.insert(out.end(), bucket->begin(), bucket->end());
        return out;
    }
};

inline WaterResult water_circles_buckets(const MemoryGraph& graph, const VecIndex& index,
                                         std::string_view query,
                                         const std::vector<VertexId>& start_vertices,
                                         const WaterConfig& cfg,
                                         const Restriction& restriction = {}) {
    detail::require_starts(graph, start_vertices);
    TripleScorer scorer(index, query);

    std::set<uint64_t> start_set;
    for (VertexId v : start_vertices) start_set.insert(v.value);

    // per-start BFS distances, capped at the ring limit
    std::vector<std::unordered_map<uint64_t, int>> dist;
    for (uint64_t s : start_set) {
        std::unordered_map<uint64_t, int> d;
        d[s] = 0;
        std::vector<uint64_t> frontier{s};
        for (int r = 1; r <= cfg.max_radius && !frontier.empty(); ++r) {
            std::vector<uint64_t> next;
            for (uint64_t u : frontier)
                for (VertexId n : graph.neighbors(VertexId{u}, restriction.accepted))
                    if (!d.count(n.value)) {
                        d[n.value] = r;
                        next.push_back(n.value);
                    }
            frontier = std::move(next);
        }
        dist.push_back(std::move(d));
    }

    // edges on shortest paths between two distinct start vertices
    std::set<uint64_t> chain_edges;
    std::vector<uint64_t> starts(start_set.begin(), start_set.end());
    std::vector<std::pair<size_t, size_t>> connected_pairs;
    for (size_t i = 0; i < starts.size(); ++i)
        for (size_t j = i + 1; j < starts.size(); ++j)
            if (auto it = dist[i].find(starts[j]); it != dist[i].end() && it->second > 0)
                connected_pairs.emplace_back(i, j);
    if (!connected_pairs.empty()) {
        std::vector<uint64_t> candidates;
        graph.for_each_edge([&](const Edge& e) {
            for (auto [i, j] : connected_pairs) {
                int d_ij = dist[i].at(starts[j]);
                auto da = dist[i].find(e.src.value);
                auto db = dist[j].find(e.dst.value);
                auto da2 = dist[i].find(e.dst.value);
                auto db2 = dist[j].find(e.src.value);
                bool on_path =
                    (da != dist[i].end() && db != dist[j].end() &&
                     da->second + 1 + db->second == d_ij) ||
                    (da2 != dist[i].end() && db2 != dist[j].end() &&
                     da2->second + 1 + db2->second == d_ij);
                if (on_path) {
                    candidates.push_back(e.id);
                    break;
                }
            }
        });
        for (uint64_t eid : candidates)
            if (restriction.allows(graph.triple_for_edge(eid))) chain_edges.insert(eid);
    }

    auto query_tokens = content_tokens(query);
    auto shares_token = [&](const Triple& t) {
        auto toks = content_tokens(t.render());
        for (const auto& qt : query_tokens)
            for (const auto& tt : toks)
                if (qt == tt) return true;
        return false;
    };

    WaterResult res;
    auto bucket_of = [&](const Triple& t, EdgeKind kind) -> std::pair<std::vector<Triple>*, int> {
        if (kind == EdgeKind::HyperEpisodic) return {&res.episodic, cfg.episodic_num};
        if (kind == EdgeKind::HyperThesis) return {&res.hyper, cfg.hyper_num};
        if (chain_edges.count(t.source_edge)) return {&res.chain, cfg.chain_triplets_num};
        return {&res.other, cfg.other_triplets_num};
    };
    auto all_full = [&] {
        return res.chain.size() >= size_t(cfg.chain_triplets_num) &&
               res.episodic.size() >= size_t(cfg.episodic_num) &&
               res.hyper.size() >= size_t(cfg.hyper_num) &&
               res.other.size() >= size_t(cfg.other_triplets_num);
    };

    std::set<uint64_t> visited(start_set.begin(), start_set.end());
    std::set<uint64_t> collected_edges;
    std::vector<uint64_t> frontier(start_set.begin(), start_set.end());

    for (int radius = 1; radius <= cfg.max_radius && !frontier.empty() && !all_full(); ++radius) {
        std::vector<uint64_t> next;
        std::vector<Triple> ring;
        for (uint64_t u : frontier) {
            for (const Triple& t : graph.incident_triples(VertexId{u}, restriction.accepted)) {
                if (!collected_edges.insert(t.source_edge).second) continue;
                auto e = graph.edge_ref(t.source_edge);
                uint64_t other = (e.src.value == u) ? e.dst.value : e.src.value;
                if (!visited.count(other)) {
                    visited.insert(other);
                    next.push_back(other);
                }
                bool touches_start = start_set.count(e.src.value) || start_set.count(e.dst.value);
                if (cfg.strict_filter) {
                    bool pass = cfg.do_text_pruning ? shares_token(t)
                                                    : (touches_start || shares_token(t));
                    if (!pass) continue;
                }
                ring.push_back(t);
            }
        }
        detail::sort_by_similarity(ring, scorer);
        for (Triple& t : ring) {
            auto [bucket, cap] = bucket_of(t, graph.edge_ref(t.source_edge).kind);
            if (bucket->size() < size_t(cap)) bucket->push_back(std::move(t));
        }
        frontier = std::move(next);
    }
    return res;
}

inline std::vector<Triple> water_circles(const MemoryGraph& graph, const VecIndex& index,
                                         std::string_view query,
                                         const std::vector<VertexId>& start_vertices,
                                         const WaterConfig& cfg,
                                         const Restriction& restriction = {}) {
    TripleScorer scorer(index, query);
    auto flat = water_circles_buckets(graph, index, query, start_vertices, cfg, restriction).all();
    detail::dedup_by_rendering(flat);
    detail::sort_by_similarity(flat, scorer);
    return flat;
}

// ---------------------------------------------------------------------------
// Hybrid combination
// ---------------------------------------------------------------------------

inline std::vector<Triple> combine_retrievals(const MemoryGraph& graph, const VecIndex& index,
                                              std::string_view query,
                                              const std::vector<VertexId>& start_vertices,
                                              Combo combo, const TraversalConfigs& configs,
                                              const Restriction& restriction = {}) {
    std::vector<Triple> merged;
    if (combo == Combo::NaiveOnly) {
        merged = naive_retrieve(graph, index, query, configs.naive, restriction);
    } else {
        merged = beam_search(graph, index, query, start_vertices, configs.beam, restriction);
        std::vector<Triple> second =
            combo == Combo::BeamWater
                ? water_circles(graph, index, query, start_vertices, configs.water, restriction)
                : naive_retrieve(graph, index, query, configs.naive, restriction);
        merged.insert(merged.end(), second.begin(), second.end());
    }
    TripleScorer scorer(index, query);
    detail::dedup_by_rendering(merged);
    detail::sort_by_similarity(merged, scorer);
    return merged;
}

}  // namespace graphmind

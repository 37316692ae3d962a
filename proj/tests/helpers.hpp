#pragma once
// Shared test machinery: independent reference oracles (BM25, cosine ranking,
// RRF, BFS reachability), deterministic generators, a function-backed LLM
// backend, and small file helpers. Oracles deliberately share no code with
// the implementation paths they check.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "graphmind/embedder.hpp"
#include "graphmind/llmio.hpp"
#include "graphmind/memgraph.hpp"
#include "graphmind/memorize.hpp"
#include "graphmind/util.hpp"
#include "graphmind/vecindex.hpp"

namespace testutil {

using namespace graphmind;

inline std::string fixture_path(const std::string& name) {
    return std::string(GRAPHMIND_FIXTURES_DIR) + "/" + name;
}

inline std::string golden_path(const std::string& name) {
    return std::string(GRAPHMIND_GOLDEN_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

inline std::string temp_path(const std::string& stem) {
    auto dir = std::filesystem::temp_directory_path() / "graphmind_tests";
    std::filesystem::create_directories(dir);
    return (dir / stem).string();
}

// ---------------------------------------------------------------------------
// Backends and embedders for tests
// ---------------------------------------------------------------------------

// Backend driven by an arbitrary function of the rendered request.
class FnBackend final : public LlmBackend {
public:
    using Fn = std::function<std::string(const RenderedRequest&)>;
    explicit FnBackend(Fn fn, std::string id = "fn") : fn_(std::move(fn)), id_(std::move(id)) {}

    std::string complete(const RenderedRequest& request, const GenerationConfig&) override {
        count_call();
        return fn_(request);
    }
    std::string id() const override { return id_; }

private:
    Fn fn_;
    std::string id_;
};

// Embeds every text to the same unit vector: similarity is always 1, which
// decouples structural traversal tests from lexical similarity.
class ConstantEmbedder final : public Embedder {
public:
    Embedding embed(std::string_view) const override {
        Embedding e;
        e.values.assign(4, 0.0);
        e.values[0] = 1.0;
        return e;
    }
    size_t dim() const override { return 4; }
};

// ---------------------------------------------------------------------------
// Reference oracles
// ---------------------------------------------------------------------------

struct RefHit {
    std::string doc_id;
    double score;
};

inline void ref_sort(std::vector<RefHit>& hits) {
    std::sort(hits.begin(), hits.end(), [](const RefHit& a, const RefHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
}

// Straight-from-the-formula BM25 over a doc map, no inverted index.
inline std::vector<RefHit> ref_bm25(const std::map<std::string, std::string>& docs,
                                    const std::string& query) {
    size_t total_tokens = 0;
    std::map<std::string, std::vector<std::string>> toks;
    for (const auto& [id, text] : docs) {
        toks[id] = tokenize(text);
        total_tokens += toks[id].size();
    }
    double avgdl = docs.empty() ? 0.0 : double(total_tokens) / double(docs.size());
    double n_docs = double(docs.size());
    std::vector<RefHit> out;
    for (const auto& [id, text] : docs) {
        double score = 0.0;
        for (const auto& term : tokenize(query)) {
            size_t tf = 0;
            for (const auto& t : toks[id])
                if (t == term) ++tf;
            if (tf == 0) continue;
            size_t df = 0;
            for (const auto& [other_id, other_text] : docs) {
                for (const auto& t : toks[other_id])
                    if (t == term) {
                        ++df;
                        break;
                    }
            }
            double idf = std::log(1.0 + (n_docs - double(df) + 0.5) / (double(df) + 0.5));
            double dl = double(toks[id].size());
            score += idf * (double(tf) * (1.2 + 1.0)) /
                     (double(tf) + 1.2 * (1.0 - 0.75 + 0.75 * dl / avgdl));
        }
        if (score > 0.0) out.push_back({id, score});
    }
    ref_sort(out);
    return out;
}

inline std::vector<RefHit> ref_cosine(const std::map<std::string, std::string>& docs,
                                      const std::string& query, const Embedder& emb) {
    Embedding q = emb.embed(query);
    std::vector<RefHit> out;
    for (const auto& [id, text] : docs) out.push_back({id, cosine(q, emb.embed(text))});
    ref_sort(out);
    return out;
}

// RRF recomputed from the two full ranked lists.
inline std::vector<RefHit> ref_rrf(const std::vector<RefHit>& dense,
                                   const std::vector<RefHit>& sparse) {
    std::map<std::string, double> fused;
    for (size_t i = 0; i < dense.size(); ++i) fused[dense[i].doc_id] += 1.0 / (60.0 + double(i + 1));
    for (size_t i = 0; i < sparse.size(); ++i)
        fused[sparse[i].doc_id] += 1.0 / (60.0 + double(i + 1));
    std::vector<RefHit> out;
    for (const auto& [id, s] : fused) out.push_back({id, s});
    ref_sort(out);
    return out;
}

// Vertices reachable within `depth` hops through accepted kinds; plain BFS
// over an adjacency rebuilt from the edge list.
inline std::set<uint64_t> ref_reachable(const MemoryGraph& g, const std::vector<VertexId>& starts,
                                        int depth, const std::set<VertexKind>& accepted) {
    std::map<uint64_t, std::vector<uint64_t>> adj;
    g.for_each_edge([&](const Edge& e) {
        VertexKind sk = g.vertex(e.src)->kind;
        VertexKind dk = g.vertex(e.dst)->kind;
        if (accepted.count(sk) && accepted.count(dk)) {
            adj[e.src.value].push_back(e.dst.value);
            adj[e.dst.value].push_back(e.src.value);
        }
    });
    std::set<uint64_t> seen;
    std::vector<uint64_t> frontier;
    for (VertexId s : starts)
        if (seen.insert(s.value).second) frontier.push_back(s.value);
    for (int d = 0; d < depth && !frontier.empty(); ++d) {
        std::vector<uint64_t> next;
        for (uint64_t u : frontier)
            for (uint64_t v : adj[u])
                if (seen.insert(v).second) next.push_back(v);
        frontier = std::move(next);
    }
    return seen;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

inline std::string random_word(std::mt19937_64& rng, size_t min_len = 3, size_t max_len = 9) {
    std::uniform_int_distribution<size_t> len(min_len, max_len);
    std::uniform_int_distribution<int> ch('a', 'z');
    std::string w(len(rng), ' ');
    for (char& c : w) c = char(ch(rng));
    return w;
}

inline std::string random_sentence(std::mt19937_64& rng, size_t words) {
    std::string out;
    for (size_t i = 0; i < words; ++i) {
        if (i) out.push_back(' ');
        out += random_word(rng);
    }
    return out;
}

struct RandomGraphSpec {
    size_t objects = 30;
    size_t theses = 6;
    size_t episodics = 4;
    size_t simple_edges = 60;
    size_t hyper_thesis_edges = 10;
    size_t hyper_episodic_edges = 12;
};

// Random typed graph with a vocabulary small enough to create overlap.
inline MemoryGraph random_graph(std::mt19937_64& rng, const RandomGraphSpec& spec) {
    MemoryGraph g;
    std::vector<VertexId> objects, theses, episodics;
    for (size_t i = 0; i < spec.objects; ++i)
        objects.push_back(
            g.upsert_vertex(VertexKind::Object, "obj " + std::to_string(i) + " " + random_word(rng)));
    for (size_t i = 0; i < spec.theses; ++i)
        theses.push_back(g.upsert_vertex(VertexKind::Thesis,
                                         "thesis " + std::to_string(i) + " " +
                                             random_sentence(rng, 5)));
    for (size_t i = 0; i < spec.episodics; ++i)
        episodics.push_back(g.upsert_vertex(VertexKind::Episodic,
                                            "episode " + std::to_string(i) + " " +
                                                random_sentence(rng, 8)));
    auto pick = [&](const std::vector<VertexId>& pool) {
        std::uniform_int_distribution<size_t> d(0, pool.size() - 1);
        return pool[d(rng)];
    };
    for (size_t i = 0; i < spec.simple_edges; ++i)
        g.upsert_edge(pick(objects), pick(objects), EdgeKind::Simple,
                      "rel " + random_word(rng, 2, 5));
    for (size_t i = 0; i < spec.hyper_thesis_edges && !theses.empty(); ++i)
        g.upsert_edge(pick(objects), pick(theses), EdgeKind::HyperThesis, "described by");
    for (size_t i = 0; i < spec.hyper_episodic_edges && !episodics.empty(); ++i) {
        std::uniform_int_distribution<int> coin(0, 1);
        VertexId src = (coin(rng) && !theses.empty()) ? pick(theses) : pick(objects);
        g.upsert_edge(src, pick(episodics), EdgeKind::HyperEpisodic, "mentioned in");
    }
    return g;
}

inline std::shared_ptr<VecIndex> index_for(const MemoryGraph& g) {
    auto idx = std::make_shared<VecIndex>(std::make_shared<HashingEmbedder>());
    rebuild_index(g, *idx);
    return idx;
}

}  // namespace testutil

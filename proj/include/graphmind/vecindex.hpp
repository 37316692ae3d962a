#pragma once
// Hybrid retrieval index over namespaced text collections: exhaustive dense
// cosine search, Okapi BM25 sparse search, and reciprocal-rank fusion.
//
// BM25 uses k1=1.2, b=0.75 and the positive-idf variant
// idf = ln(1 + (N - df + 0.5) / (df + 0.5)). Fusion is RRF with constant 60
// over the two full-depth ranked lists. All ties break by doc_id ascending,
// so results are reproducible across runs and platforms.

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "graphmind/embedder.hpp"
#include "graphmind/errors.hpp"
#include "graphmind/util.hpp"

namespace graphmind {

struct ScoredHit {
    std::string doc_id;
    double score = 0.0;
    int rank = 0;
};

constexpr double kBm25K1 = 1.2;
constexpr double kBm25B = 0.75;
constexpr double kRrfConstant = 60.0;

class VecIndex {
public:
    explicit VecIndex(std::shared_ptr<const Embedder> embedder)
        : embedder_(std::move(embedder)) {}

    // Indexing the same id again replaces the previous document.
    void index_text(const std::string& ns, const std::string& doc_id, std::string_view text) {
        std::unique_lock lock(mutex_);
        Namespace& n = namespaces_[ns];
        auto it = n.docs.find(doc_id);
        if (it != n.docs.end()) remove_locked(n, doc_id, it->second);
        Doc d;
        d.text = std::string(text);
        d.embedding = embedder_->embed(text);
        d.tokens = tokenize(text);
        for (const auto& t : d.tokens) ++n.postings[t][doc_id];
        n.total_tokens += d.tokens.size();
        n.docs.emplace(doc_id, std::move(d));
    }

    bool has_namespace(const std::string& ns) const {
        std::shared_lock lock(mutex_);
        auto it = namespaces_.find(ns);
        return it != namespaces_.end() && !it->second.docs.empty();
    }

    size_t size(const std::string& ns) const {
        std::shared_lock lock(mutex_);
        auto it = namespaces_.find(ns);
        return it == namespaces_.end() ? 0 : it->second.docs.size();
    }

    std::vector<ScoredHit> sparse_search(const std::string& ns, std::string_view query,
                                         size_t k) const {
        std::shared_lock lock(mutex_);
        const Namespace& n = get_ns(ns);
        auto scored = bm25_all_locked(n, query);
        truncate_ranked(scored, k);
        return scored;
    }

    std::vector<ScoredHit> dense_search(const std::string& ns, std::string_view query,
                                        size_t k) const {
        std::shared_lock lock(mutex_);
        const Namespace& n = get_ns(ns);
        auto scored = cosine_all_locked(n, embedder_->embed(query));
        truncate_ranked(scored, k);
        return scored;
    }

    // RRF over the full dense and sparse rankings, then top-k.
    std::vector<ScoredHit> hybrid_search(const std::string& ns, std::string_view query,
                                         size_t k) const {
        std::shared_lock lock(mutex_);
        const Namespace& n = get_ns(ns);
        auto dense = cosine_all_locked(n, embedder_->embed(query));
        auto sparse = bm25_all_locked(n, query);
        std::map<std::string, double> fused;
        for (const auto& hit : dense) fused[hit.doc_id] += 1.0 / (kRrfConstant + hit.rank);
        for (const auto& hit : sparse) fused[hit.doc_id] += 1.0 / (kRrfConstant + hit.rank);
        std::vector<ScoredHit> out;
        out.reserve(fused.size());
        for (const auto& [id, score] : fused) out.push_back({id, score, 0});
        sort_ranked(out);
        truncate_ranked(out, k);
        return out;
    }

    // Stored embedding lookup so traversal can score indexed renderings
    // without re-embedding.
    const Embedding* stored_embedding(const std::string& ns, const std::string& doc_id) const {
        std::shared_lock lock(mutex_);
        auto nit = namespaces_.find(ns);
        if (nit == namespaces_.end()) return nullptr;
        auto dit = nit->second.docs.find(doc_id);
        return dit == nit->second.docs.end() ? nullptr : &dit->second.embedding;
    }

    const Embedder& embedder() const { return *embedder_; }

private:
    struct Doc {
        std::string text;
        Embedding embedding;
        std::vector<std::string> tokens;
    };

    struct Namespace {
        std::map<std::string, Doc> docs;  // ordered: deterministic iteration
        std::unordered_map<std::string, std::map<std::string, uint32_t>> postings;
        size_t total_tokens = 0;
    };

    const Namespace& get_ns(const std::string& ns) const {
        auto it = namespaces_.find(ns);
        if (it == namespaces_.end()) throw Error(ErrorCode::UnknownNamespace, ns);
        return it->second;
    }

    static void remove_locked(Namespace& n, const std::string& doc_id, const Doc& d) {
        for (const auto& t : d.tokens) {
            auto pit = n.postings.find(t);
            if (pit != n.postings.end()) {
                pit->second.erase(doc_id);
                if (pit->second.empty()) n.postings.erase(pit);
            }
        }
        n.total_tokens -= d.tokens.size();
        n.docs.erase(doc_id);
    }

    // Score every doc containing at least one query term.
    static std::vector<ScoredHit> bm25_all_locked(const Namespace& n, std::string_view query) {
        std::vector<ScoredHit> out;
        if (n.docs.empty()) return out;
        double avgdl = double(n.total_tokens) / double(n.docs.size());
        double num_docs = double(n.docs.size());

        // collapse repeated query terms so each contributes once per repeat
        std::map<std::string, uint32_t> qterms;
        for (const auto& t : tokenize(query)) ++qterms[t];

        std::map<std::string, double> scores;
        for (const auto& [term, qtf] : qterms) {
            auto pit = n.postings.find(term);
            if (pit == n.postings.end()) continue;
            double df = double(pit->second.size());
            double idf = std::log(1.0 + (num_docs - df + 0.5) / (df + 0.5));
            for (const auto& [doc_id, tf] : pit->second) {
                double dl = double(n.docs.at(doc_id).tokens.size());
                double denom = double(tf) + kBm25K1 * (1.0 - kBm25B + kBm25B * dl / avgdl);
                scores[doc_id] += double(qtf) * idf * (double(tf) * (kBm25K1 + 1.0)) / denom;
            }
        }
        out.reserve(scores.size());
        for (const auto& [id, s] : scores) out.push_back({id, s, 0});
        sort_ranked(out);
        return out;
    }

    static std::vector<ScoredHit> cosine_all_locked(const Namespace& n, const Embedding& q) {
        std::vector<ScoredHit> out;
        out.reserve(n.docs.size());
        for (const auto& [id, d] : n.docs) out.push_back({id, cosine(q, d.embedding), 0});
        sort_ranked(out);
        return out;
    }

    static void sort_ranked(std::vector<ScoredHit>& hits) {
        std::sort(hits.begin(), hits.end(), [](const ScoredHit& a, const ScoredHit& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.doc_id < b.doc_id;
        });
        for (size_t i = 0; i < hits.size(); ++i) hits[i].rank = int(i + 1);
    }

    static void truncate_ranked(std::vector<ScoredHit>& hits, size_t k) {
        if (hits.size() > k) hits.resize(k);
    }

    std::shared_ptr<const Embedder> embedder_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, Namespace> namespaces_;
};

}  // namespace graphmind

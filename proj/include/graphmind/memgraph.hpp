#pragma once
// MemoryGraph: embedded property-graph store with three vertex kinds
// (Object / Thesis / Episodic), three edge kinds (Simple / HyperEpisodic /
// HyperThesis), exact-match dedup, and line-delimited snapshot persistence.
//
// Dedup key is byte-equality of UTF-8 text after trimming leading/trailing
// whitespace; no case folding. Hyper edges are stored pairwise as binary
// edges with a distinguished kind. Ids come from one internal counter and
// survive snapshot roundtrips.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "graphmind/errors.hpp"
#include "graphmind/util.hpp"

namespace graphmind {

enum class VertexKind { Object, Thesis, Episodic };
enum class EdgeKind { Simple, HyperEpisodic, HyperThesis };

inline const char* vertex_kind_name(VertexKind k) {
    switch (k) {
        case VertexKind::Object: return "Object";
        case VertexKind::Thesis: return "Thesis";
        case VertexKind::Episodic: return "Episodic";
    }
    return "?";
}

inline const char* edge_kind_name(EdgeKind k) {
    switch (k) {
        case EdgeKind::Simple: return "Simple";
        case EdgeKind::HyperEpisodic: return "HyperEpisodic";
        case EdgeKind::HyperThesis: return "HyperThesis";
    }
    return "?";
}

inline std::optional<VertexKind> vertex_kind_from(std::string_view s) {
    if (s == "Object") return VertexKind::Object;
    if (s == "Thesis") return VertexKind::Thesis;
    if (s == "Episodic") return VertexKind::Episodic;
    return std::nullopt;
}

inline std::optional<EdgeKind> edge_kind_from(std::string_view s) {
    if (s == "Simple") return EdgeKind::Simple;
    if (s == "HyperEpisodic") return EdgeKind::HyperEpisodic;
    if (s == "HyperThesis") return EdgeKind::HyperThesis;
    return std::nullopt;
}

struct VertexId {
    uint64_t value = 0;
    auto operator<=>(const VertexId&) const = default;
};

struct VertexIdHash {
    size_t operator()(VertexId id) const { return std::hash<uint64_t>()(id.value); }
};

using Attrs = std::map<std::string, std::string>;

struct Vertex {
    VertexId id;
    VertexKind kind = VertexKind::Object;
    std::string text;
    Attrs attrs;
};

struct Edge {
    uint64_t id = 0;
    EdgeKind kind = EdgeKind::Simple;
    VertexId src;  // subject side (Object, or Object/Thesis for HyperEpisodic)
    VertexId dst;  // object side (Object / Episodic / Thesis per kind)
    std::string predicate;
    Attrs attrs;
};

// Textual (subject, predicate, object) view of an edge. Equality is
// byte-equality of the three text fields; rendering is "s | p | o".
struct Triple {
    std::string subject_text;
    std::string predicate_text;
    std::string object_text;
    uint64_t source_edge = 0;
    std::set<VertexKind> incident_kinds;

    std::string render() const {
        return subject_text + " | " + predicate_text + " | " + object_text;
    }
    bool operator==(const Triple& o) const {
        return subject_text == o.subject_text && predicate_text == o.predicate_text &&
               object_text == o.object_text;
    }
};

struct DegreeMoments {
    double mean = 0.0;
    double stddev = 0.0;
    bool operator==(const DegreeMoments&) const = default;
};

struct GraphStats {
    std::map<std::string, uint64_t> vertex_counts;  // keyed by kind name
    std::map<std::string, uint64_t> edge_counts;
    // neighbor_degrees["Object->Episodic"]: over Episodic vertices, the number
    // of adjacent Object vertices (matches the construction-statistics layout).
    std::map<std::string, DegreeMoments> neighbor_degrees;

    bool operator==(const GraphStats&) const = default;
};

class MemoryGraph {
public:
    MemoryGraph() = default;
    MemoryGraph(const MemoryGraph&) = delete;
    MemoryGraph& operator=(const MemoryGraph&) = delete;

    // moves are for handing over freshly built graphs, not concurrent use
    MemoryGraph(MemoryGraph&& other) noexcept { *this = std::move(other); }
    MemoryGraph& operator=(MemoryGraph&& other) noexcept {
        if (this != &other) {
            next_id_ = other.next_id_;
            vertices_ = std::move(other.vertices_);
            edges_ = std::move(other.edges_);
            text_index_ = std::move(other.text_index_);
            edge_index_ = std::move(other.edge_index_);
            adjacency_ = std::move(other.adjacency_);
        }
        return *this;
    }

    // ---- mutation (exclusive writer) ------------------------------------

    VertexId upsert_vertex(VertexKind kind, std::string_view text, const Attrs& attrs = {}) {
        std::unique_lock lock(mutex_);
        return upsert_vertex_locked(kind, text, attrs);
    }

    struct UpsertVertexResult {
        VertexId id;
        bool created = false;
    };

    UpsertVertexResult upsert_vertex_ex(VertexKind kind, std::string_view text,
                                        const Attrs& attrs = {}) {
        std::unique_lock lock(mutex_);
        size_t before = vertices_.size();
        VertexId id = upsert_vertex_locked(kind, text, attrs);
        return {id, vertices_.size() > before};
    }

    struct UpsertEdgeResult {
        uint64_t edge_id = 0;
        bool created = false;
    };

    // Endpoint texts are resolved by trimmed-exact match, preferring the kinds
    // the edge contract requires; a text stored only under a forbidden kind is
    // a KindMismatch. Missing endpoints are created with the required kind.
    UpsertEdgeResult upsert_triple(std::string_view subject_text, std::string_view predicate_text,
                                   std::string_view object_text, EdgeKind kind,
                                   const Attrs& attrs = {}) {
        std::string pred = trim(predicate_text);
        if (trim_view(subject_text).empty() || pred.empty() || trim_view(object_text).empty())
            throw Error(ErrorCode::EmptyText, "triple texts must be non-empty");

        std::unique_lock lock(mutex_);
        VertexId src, dst;
        switch (kind) {
            case EdgeKind::Simple:
                src = resolve_endpoint_locked(subject_text, {VertexKind::Object});
                dst = resolve_endpoint_locked(object_text, {VertexKind::Object});
                break;
            case EdgeKind::HyperThesis:
                src = resolve_endpoint_locked(subject_text, {VertexKind::Object});
                dst = resolve_endpoint_locked(object_text, {VertexKind::Thesis});
                break;
            case EdgeKind::HyperEpisodic:
                src = resolve_endpoint_locked(subject_text, {VertexKind::Thesis, VertexKind::Object});
                dst = resolve_endpoint_locked(object_text, {VertexKind::Episodic});
                break;
        }
        return upsert_edge_locked(src, dst, kind, pred, attrs);
    }

    // Id-based variant for callers that already hold vertex ids.
    UpsertEdgeResult upsert_edge(VertexId src, VertexId dst, EdgeKind kind,
                                 std::string_view predicate, const Attrs& attrs = {}) {
        std::string pred = trim(predicate);
        if (pred.empty()) throw Error(ErrorCode::EmptyText, "predicate must be non-empty");
        std::unique_lock lock(mutex_);
        check_endpoint_kinds_locked(src, dst, kind);
        return upsert_edge_locked(src, dst, kind, pred, attrs);
    }

    // ---- queries (shared readers) ----------------------------------------

    std::optional<Vertex> vertex(VertexId id) const {
        std::shared_lock lock(mutex_);
        auto it = vertices_.find(id.value);
        if (it == vertices_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<VertexId> find_vertex(VertexKind kind, std::string_view text) const {
        std::shared_lock lock(mutex_);
        auto it = text_index_.find(text_key(kind, trim_view(text)));
        if (it == text_index_.end()) return std::nullopt;
        return VertexId{it->second};
    }

    std::optional<Edge> edge(uint64_t id) const {
        std::shared_lock lock(mutex_);
        auto it = edges_.find(id);
        if (it == edges_.end()) return std::nullopt;
        return it->second;
    }

    struct EdgeRef {
        uint64_t id;
        EdgeKind kind;
        VertexId src;
        VertexId dst;
    };

    EdgeRef edge_ref(uint64_t id) const {
        std::shared_lock lock(mutex_);
        auto it = edges_.find(id);
        if (it == edges_.end())
            throw Error(ErrorCode::UnknownVertex, "edge " + std::to_string(id));
        const Edge& e = it->second;
        return {e.id, e.kind, e.src, e.dst};
    }

    // Visits every edge in id order without copying texts.
    template <typename F>
    void for_each_edge(F&& fn) const {
        std::shared_lock lock(mutex_);
        std::vector<uint64_t> ids;
        ids.reserve(edges_.size());
        for (const auto& [id, e] : edges_) ids.push_back(id);
        std::sort(ids.begin(), ids.end());
        for (uint64_t id : ids) fn(edges_.at(id));
    }

    // Every triple touching `id` whose incident kinds are all accepted,
    // ordered by edge id ascending.
    std::vector<Triple> incident_triples(VertexId id, const std::set<VertexKind>& accepted) const {
        std::shared_lock lock(mutex_);
        auto vit = vertices_.find(id.value);
        if (vit == vertices_.end())
            throw Error(ErrorCode::UnknownVertex, "vertex " + std::to_string(id.value));
        std::vector<Triple> out;
        auto ait = adjacency_.find(id.value);
        if (ait == adjacency_.end()) return out;
        std::vector<uint64_t> edge_ids(ait->second.begin(), ait->second.end());
        std::sort(edge_ids.begin(), edge_ids.end());
        for (uint64_t eid : edge_ids) {
            const Edge& e = edges_.at(eid);
            Triple t = triple_from_edge_locked(e);
            bool ok = true;
            for (VertexKind k : t.incident_kinds)
                if (!accepted.count(k)) ok = false;
            if (ok) out.push_back(std::move(t));
        }
        return out;
    }

    // Distinct adjacent vertices of an accepted kind, ascending by id.
    std::vector<VertexId> neighbors(VertexId id, const std::set<VertexKind>& accepted) const {
        std::shared_lock lock(mutex_);
        auto vit = vertices_.find(id.value);
        if (vit == vertices_.end())
            throw Error(ErrorCode::UnknownVertex, "vertex " + std::to_string(id.value));
        std::set<uint64_t> seen;
        auto ait = adjacency_.find(id.value);
        if (ait != adjacency_.end()) {
            for (uint64_t eid : ait->second) {
                const Edge& e = edges_.at(eid);
                uint64_t other = (e.src.value == id.value) ? e.dst.value : e.src.value;
                if (accepted.count(vertices_.at(other).kind)) seen.insert(other);
            }
        }
        std::vector<VertexId> out;
        out.reserve(seen.size());
        for (uint64_t v : seen) out.push_back(VertexId{v});
        return out;
    }

    GraphStats stats() const {
        std::shared_lock lock(mutex_);
        GraphStats s;
        for (VertexKind k : {VertexKind::Object, VertexKind::Thesis, VertexKind::Episodic})
            s.vertex_counts[vertex_kind_name(k)] = 0;
        for (EdgeKind k : {EdgeKind::Simple, EdgeKind::HyperEpisodic, EdgeKind::HyperThesis})
            s.edge_counts[edge_kind_name(k)] = 0;
        for (const auto& [id, v] : vertices_) ++s.vertex_counts[vertex_kind_name(v.kind)];
        for (const auto& [id, e] : edges_) ++s.edge_counts[edge_kind_name(e.kind)];

        // degrees[target][source] = per-vertex counts of distinct source-kind
        // neighbors, aggregated over all vertices of the target kind
        for (VertexKind target : {VertexKind::Object, VertexKind::Thesis, VertexKind::Episodic}) {
            for (VertexKind source : {VertexKind::Object, VertexKind::Thesis, VertexKind::Episodic}) {
                std::vector<uint64_t> counts;
                for (const auto& [id, v] : vertices_) {
                    if (v.kind != target) continue;
                    std::set<uint64_t> distinct;
                    auto ait = adjacency_.find(id);
                    if (ait != adjacency_.end()) {
                        for (uint64_t eid : ait->second) {
                            const Edge& e = edges_.at(eid);
                            uint64_t other = (e.src.value == id) ? e.dst.value : e.src.value;
                            if (vertices_.at(other).kind == source) distinct.insert(other);
                        }
                    }
                    counts.push_back(distinct.size());
                }
                DegreeMoments m;
                if (!counts.empty()) {
                    double sum = 0;
                    for (uint64_t c : counts) sum += double(c);
                    m.mean = sum / double(counts.size());
                    double var = 0;
                    for (uint64_t c : counts) var += (double(c) - m.mean) * (double(c) - m.mean);
                    m.stddev = std::sqrt(var / double(counts.size()));
                }
                s.neighbor_degrees[std::string(vertex_kind_name(source)) + "->" +
                                   vertex_kind_name(target)] = m;
            }
        }
        return s;
    }

    std::vector<uint64_t> vertex_ids() const {
        std::shared_lock lock(mutex_);
        std::vector<uint64_t> out;
        out.reserve(vertices_.size());
        for (const auto& [id, v] : vertices_) out.push_back(id);
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<uint64_t> edge_ids() const {
        std::shared_lock lock(mutex_);
        std::vector<uint64_t> out;
        out.reserve(edges_.size());
        for (const auto& [id, e] : edges_) out.push_back(id);
        std::sort(out.begin(), out.end());
        return out;
    }

    size_t vertex_count() const {
        std::shared_lock lock(mutex_);
        return vertices_.size();
    }

    size_t edge_count() const {
        std::shared_lock lock(mutex_);
        return edges_.size();
    }

    std::map<std::string, uint64_t> vertex_kind_counts() const {
        std::shared_lock lock(mutex_);
        std::map<std::string, uint64_t> out;
        for (VertexKind k : {VertexKind::Object, VertexKind::Thesis, VertexKind::Episodic})
            out[vertex_kind_name(k)] = 0;
        for (const auto& [id, v] : vertices_) ++out[vertex_kind_name(v.kind)];
        return out;
    }

    std::map<std::string, uint64_t> edge_kind_counts() const {
        std::shared_lock lock(mutex_);
        std::map<std::string, uint64_t> out;
        for (EdgeKind k : {EdgeKind::Simple, EdgeKind::HyperEpisodic, EdgeKind::HyperThesis})
            out[edge_kind_name(k)] = 0;
        for (const auto& [id, e] : edges_) ++out[edge_kind_name(e.kind)];
        return out;
    }

    Triple triple_for_edge(uint64_t edge_id) const {
        std::shared_lock lock(mutex_);
        auto it = edges_.find(edge_id);
        if (it == edges_.end())
            throw Error(ErrorCode::UnknownVertex, "edge " + std::to_string(edge_id));
        return triple_from_edge_locked(it->second);
    }

    // ---- persistence ------------------------------------------------------
    //
    // Format (bit-exact):
    //   GRAPHMIND-SNAPSHOT v1
    //   V <id> <kind> <base64(text)> <base64(attrs json, key-sorted)>
    //   E <id> <kind> <src-id> <dst-id> <base64(predicate)> <base64(attrs)>
    //   CHECKSUM <hex of 64-bit FNV-1a over preceding bytes>

    void save_snapshot(const std::string& path) const {
        std::string body = serialize();
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot open for write: " + path);
        out << body;
        if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
    }

    std::string serialize() const {
        std::shared_lock lock(mutex_);
        std::ostringstream body;
        body << "GRAPHMIND-SNAPSHOT v1\n";
        for (uint64_t id : sorted_keys(vertices_)) {
            const Vertex& v = vertices_.at(id);
            body << "V\t" << id << '\t' << vertex_kind_name(v.kind) << '\t'
                 << base64_encode(v.text) << '\t' << base64_encode(encode_attrs(v.attrs)) << '\n';
        }
        for (uint64_t id : sorted_keys(edges_)) {
            const Edge& e = edges_.at(id);
            body << "E\t" << id << '\t' << edge_kind_name(e.kind) << '\t' << e.src.value << '\t'
                 << e.dst.value << '\t' << base64_encode(e.predicate) << '\t'
                 << base64_encode(encode_attrs(e.attrs)) << '\n';
        }
        std::string text = body.str();
        text += "CHECKSUM " + to_hex64(fnv1a64(text)) + "\n";
        return text;
    }

    static MemoryGraph load_snapshot(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(ErrorCode::IoError, "cannot open: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return deserialize(ss.str());
    }

    static MemoryGraph deserialize(const std::string& data) {
        size_t checksum_pos = data.rfind("CHECKSUM ");
        if (checksum_pos == std::string::npos || (checksum_pos != 0 && data[checksum_pos - 1] != '\n'))
            throw Error(ErrorCode::CorruptSnapshot, "missing checksum line");
        std::string_view tail(data.data() + checksum_pos, data.size() - checksum_pos);
        if (tail.size() < 10 + 16 || tail.substr(9, 16) != to_hex64(fnv1a64(
                std::string_view(data.data(), checksum_pos))))
            throw Error(ErrorCode::CorruptSnapshot, "checksum mismatch");

        MemoryGraph g;
        std::istringstream in(data.substr(0, checksum_pos));
        std::string line;
        if (!std::getline(in, line) || line != "GRAPHMIND-SNAPSHOT v1")
            throw Error(ErrorCode::CorruptSnapshot, "bad header");
        uint64_t max_id = 0;
        while (std::getline(in, line)) {
            auto fields = split_tabs(line);
            if (fields.empty()) continue;
            if (fields[0] == "V") {
                if (fields.size() != 5) throw Error(ErrorCode::CorruptSnapshot, "bad V record");
                Vertex v;
                v.id = VertexId{parse_u64(fields[1])};
                auto kind = vertex_kind_from(fields[2]);
                if (!kind) throw Error(ErrorCode::CorruptSnapshot, "bad vertex kind");
                v.kind = *kind;
                if (!base64_decode(fields[3], v.text))
                    throw Error(ErrorCode::CorruptSnapshot, "bad vertex text");
                v.attrs = decode_attrs(fields[4]);
                max_id = std::max(max_id, v.id.value);
                g.text_index_[text_key(v.kind, v.text)] = v.id.value;
                g.vertices_.emplace(v.id.value, std::move(v));
            } else if (fields[0] == "E") {
                if (fields.size() != 7) throw Error(ErrorCode::CorruptSnapshot, "bad E record");
                Edge e;
                e.id = parse_u64(fields[1]);
                auto kind = edge_kind_from(fields[2]);
                if (!kind) throw Error(ErrorCode::CorruptSnapshot, "bad edge kind");
                e.kind = *kind;
                e.src = VertexId{parse_u64(fields[3])};
                e.dst = VertexId{parse_u64(fields[4])};
                if (!base64_decode(fields[5], e.predicate))
                    throw Error(ErrorCode::CorruptSnapshot, "bad predicate");
                e.attrs = decode_attrs(fields[6]);
                if (!g.vertices_.count(e.src.value) || !g.vertices_.count(e.dst.value))
                    throw Error(ErrorCode::CorruptSnapshot, "dangling edge endpoint");
                max_id = std::max(max_id, e.id);
                g.edge_index_[edge_key(e.kind, e.src.value, e.dst.value, e.predicate)] = e.id;
                g.adjacency_[e.src.value].push_back(e.id);
                if (e.dst.value != e.src.value) g.adjacency_[e.dst.value].push_back(e.id);
                g.edges_.emplace(e.id, std::move(e));
            } else {
                throw Error(ErrorCode::CorruptSnapshot, "unknown record type: " + fields[0]);
            }
        }
        g.next_id_ = max_id + 1;
        return g;
    }

private:
    static std::string text_key(VertexKind kind, std::string_view trimmed_text) {
        return std::string(vertex_kind_name(kind)) + "\x1f" + std::string(trimmed_text);
    }

    static std::string edge_key(EdgeKind kind, uint64_t src, uint64_t dst,
                                std::string_view predicate) {
        return std::string(edge_kind_name(kind)) + "\x1f" + std::to_string(src) + "\x1f" +
               std::to_string(dst) + "\x1f" + std::string(predicate);
    }

    VertexId upsert_vertex_locked(VertexKind kind, std::string_view text, const Attrs& attrs) {
        std::string_view trimmed = trim_view(text);
        if (trimmed.empty()) throw Error(ErrorCode::EmptyText, "vertex text must be non-empty");
        auto key = text_key(kind, trimmed);
        auto it = text_index_.find(key);
        if (it != text_index_.end()) {
            Vertex& v = vertices_.at(it->second);
            for (const auto& [k, val] : attrs) v.attrs[k] = val;  // new keys win
            return v.id;
        }
        Vertex v;
        v.id = VertexId{next_id_++};
        v.kind = kind;
        v.text = std::string(trimmed);
        v.attrs = attrs;
        text_index_[key] = v.id.value;
        uint64_t id = v.id.value;
        vertices_.emplace(id, std::move(v));
        return VertexId{id};
    }

    // Look up trimmed text under each allowed kind in order; if it only exists
    // under a forbidden kind, the caller is crossing the schema.
    VertexId resolve_endpoint_locked(std::string_view text, std::vector<VertexKind> allowed) {
        std::string_view trimmed = trim_view(text);
        if (trimmed.empty()) throw Error(ErrorCode::EmptyText, "endpoint text must be non-empty");
        for (VertexKind k : allowed) {
            auto it = text_index_.find(text_key(k, trimmed));
            if (it != text_index_.end()) return VertexId{it->second};
        }
        for (VertexKind k : {VertexKind::Object, VertexKind::Thesis, VertexKind::Episodic}) {
            if (std::find(allowed.begin(), allowed.end(), k) != allowed.end()) continue;
            if (text_index_.count(text_key(k, trimmed)))
                throw Error(ErrorCode::KindMismatch,
                            "\"" + std::string(trimmed) + "\" exists as " + vertex_kind_name(k));
        }
        // create under the last allowed kind (Object for hyper-episodic subjects)
        return upsert_vertex_locked(allowed.back(), trimmed, {});
    }

    void check_endpoint_kinds_locked(VertexId src, VertexId dst, EdgeKind kind) const {
        auto sit = vertices_.find(src.value);
        auto dit = vertices_.find(dst.value);
        if (sit == vertices_.end() || dit == vertices_.end())
            throw Error(ErrorCode::UnknownVertex, "edge endpoint does not exist");
        VertexKind sk = sit->second.kind, dk = dit->second.kind;
        bool ok = false;
        switch (kind) {
            case EdgeKind::Simple:
                ok = sk == VertexKind::Object && dk == VertexKind::Object;
                break;
            case EdgeKind::HyperEpisodic:
                ok = (sk == VertexKind::Object || sk == VertexKind::Thesis) &&
                     dk == VertexKind::Episodic;
                break;
            case EdgeKind::HyperThesis:
                ok = sk == VertexKind::Object && dk == VertexKind::Thesis;
                break;
        }
        if (!ok)
            throw Error(ErrorCode::KindMismatch, std::string(edge_kind_name(kind)) + " between " +
                                                     vertex_kind_name(sk) + " and " +
                                                     vertex_kind_name(dk));
    }

    UpsertEdgeResult upsert_edge_locked(VertexId src, VertexId dst, EdgeKind kind,
                                        const std::string& predicate, const Attrs& attrs) {
        auto key = edge_key(kind, src.value, dst.value, predicate);
        auto it = edge_index_.find(key);
        if (it != edge_index_.end()) {
            Edge& e = edges_.at(it->second);
            for (const auto& [k, val] : attrs) e.attrs[k] = val;
            return {e.id, false};
        }
        Edge e;
        e.id = next_id_++;
        e.kind = kind;
        e.src = src;
        e.dst = dst;
        e.predicate = predicate;
        e.attrs = attrs;
        edge_index_[key] = e.id;
        adjacency_[src.value].push_back(e.id);
        if (dst.value != src.value) adjacency_[dst.value].push_back(e.id);
        uint64_t id = e.id;
        edges_.emplace(id, std::move(e));
        return {id, true};
    }

    Triple triple_from_edge_locked(const Edge& e) const {
        const Vertex& s = vertices_.at(e.src.value);
        const Vertex& o = vertices_.at(e.dst.value);
        Triple t;
        t.subject_text = s.text;
        t.predicate_text = e.predicate;
        t.object_text = o.text;
        t.source_edge = e.id;
        t.incident_kinds = {s.kind, o.kind};
        return t;
    }

    static std::string encode_attrs(const Attrs& attrs) {
        // Canonical form: key-sorted (std::map iteration) "k\x1fv" records
        // joined by \x1e. Empty map encodes to the empty string.
        std::string out;
        bool first = true;
        for (const auto& [k, v] : attrs) {
            if (!first) out.push_back('\x1e');
            first = false;
            out += k;
            out.push_back('\x1f');
            out += v;
        }
        return out;
    }

    static Attrs decode_attrs(std::string_view field) {
        std::string raw;
        if (!base64_decode(field, raw)) throw Error(ErrorCode::CorruptSnapshot, "bad attrs");
        Attrs attrs;
        if (raw.empty()) return attrs;
        size_t start = 0;
        while (start <= raw.size()) {
            size_t end = raw.find('\x1e', start);
            std::string_view rec(raw.data() + start,
                                 (end == std::string::npos ? raw.size() : end) - start);
            size_t sep = rec.find('\x1f');
            if (sep == std::string_view::npos)
                throw Error(ErrorCode::CorruptSnapshot, "bad attr record");
            attrs[std::string(rec.substr(0, sep))] = std::string(rec.substr(sep + 1));
            if (end == std::string::npos) break;
            start = end + 1;
        }
        return attrs;
    }

    static uint64_t parse_u64(const std::string& s) {
        if (s.empty()) throw Error(ErrorCode::CorruptSnapshot, "empty numeric field");
        uint64_t v = 0;
        for (char c : s) {
            if (c < '0' || c > '9') throw Error(ErrorCode::CorruptSnapshot, "bad number: " + s);
            v = v * 10 + uint64_t(c - '0');
        }
        return v;
    }

    static std::vector<std::string> split_tabs(const std::string& line) {
        std::vector<std::string> out;
        size_t start = 0;
        while (start <= line.size()) {
            size_t tab = line.find('\t', start);
            if (tab == std::string::npos) {
                out.push_back(line.substr(start));
                break;
            }
            out.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        return out;
    }

    template <typename M>
    static std::vector<uint64_t> sorted_keys(const M& m) {
        std::vector<uint64_t> keys;
        keys.reserve(m.size());
        for (const auto& [k, v] : m) keys.push_back(k);
        std::sort(keys.begin(), keys.end());
        return keys;
    }

    mutable std::shared_mutex mutex_;
    uint64_t next_id_ = 1;
    std::unordered_map<uint64_t, Vertex> vertices_;
    std::unordered_map<uint64_t, Edge> edges_;
    std::unordered_map<std::string, uint64_t> text_index_;   // (kind, text) -> vertex id
    std::unordered_map<std::string, uint64_t> edge_index_;   // (kind, src, dst, pred) -> edge id
    std::unordered_map<uint64_t, std::vector<uint64_t>> adjacency_;
};

inline const std::set<VertexKind>& all_vertex_kinds() {
    static const std::set<VertexKind> kinds = {VertexKind::Object, VertexKind::Thesis,
                                               VertexKind::Episodic};
    return kinds;
}

}  // namespace graphmind

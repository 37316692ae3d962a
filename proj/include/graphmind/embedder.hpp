#pragma once
// Text embedding interface plus the built-in deterministic embedder.
//
// HashingEmbedder folds character 3-grams of the lowercased text into a
// 64-dim signed feature-hash vector and L2-normalizes it. Same text always
// gives the same vector, and cosine similarity roughly tracks lexical
// overlap, which is all the desk-scale pipeline needs.

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "graphmind/util.hpp"

namespace graphmind {

struct Embedding {
    std::vector<double> values;

    size_t dim() const { return values.size(); }

    double norm() const {
        double s = 0;
        for (double v : values) s += v * v;
        return std::sqrt(s);
    }

    void normalize() {
        double n = norm();
        if (n == 0.0) return;  // degenerate inputs keep the zero vector
        for (double& v : values) v /= n;
    }
};

inline double cosine(const Embedding& a, const Embedding& b) {
    double dot = 0, na = 0, nb = 0;
    size_t n = std::min(a.values.size(), b.values.size());
    for (size_t i = 0; i < n; ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual Embedding embed(std::string_view text) const = 0;
    virtual size_t dim() const = 0;
};

class HashingEmbedder final : public Embedder {
public:
    explicit HashingEmbedder(size_t dim = 64) : dim_(dim) {}

    Embedding embed(std::string_view text) const override {
        Embedding e;
        e.values.assign(dim_, 0.0);
        std::string lower = to_lower_ascii(text);
        if (lower.size() >= 3) {
            for (size_t i = 0; i + 3 <= lower.size(); ++i) {
                uint64_t h = fnv1a64(std::string_view(lower.data() + i, 3));
                size_t bucket = size_t(h % dim_);
                double sign = ((h >> 32) & 1) ? 1.0 : -1.0;
                e.values[bucket] += sign;
            }
        } else if (!lower.empty()) {
            uint64_t h = fnv1a64(lower);
            e.values[size_t(h % dim_)] += ((h >> 32) & 1) ? 1.0 : -1.0;
        }
        e.normalize();
        return e;
    }

    size_t dim() const override { return dim_; }

private:
    size_t dim_;
};

}  // namespace graphmind

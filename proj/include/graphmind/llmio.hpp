#pragma once
// LLM gateway: deterministic generation config, template rendering, a
// content-addressed response cache and two backends (scripted fixture rules
// for tests, HTTP chat-completion for real deployments).
//
// Cache keys are SHA-256 over (backend id, template hash, generation config,
// rendered messages); identical in-flight requests are coalesced so the
// backend is called exactly once per distinct key.

#include <array>
#include <atomic>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "graphmind/errors.hpp"
#include "graphmind/prompts.hpp"
#include "graphmind/util.hpp"

namespace graphmind {

struct GenerationConfig {
    int max_tokens = 2048;
    int seed = 42;
    double temperature = 0.0;
    int top_k = 1;

    bool operator==(const GenerationConfig&) const = default;

    std::string key_material() const {
        std::ostringstream os;
        os << "mt=" << max_tokens << ";seed=" << seed << ";temp=" << temperature
           << ";topk=" << top_k;
        return os.str();
    }
};

struct ChatRequest {
    std::string template_name;
    std::map<std::string, std::string> bindings;
    GenerationConfig config;
};

struct RenderedRequest {
    std::string template_name;
    std::string system;
    std::string user;
    std::string assistant_prefix;

    std::string flat() const { return system + "\n" + user + "\n" + assistant_prefix; }
};

class LlmBackend {
public:
    LlmBackend() = default;
    LlmBackend(const LlmBackend& other) : calls_(other.calls_.load()) {}
    LlmBackend& operator=(const LlmBackend& other) {
        calls_ = other.calls_.load();
        return *this;
    }
    virtual ~LlmBackend() = default;

    virtual std::string complete(const RenderedRequest& request, const GenerationConfig& cfg) = 0;
    virtual std::string id() const = 0;

    uint64_t call_count() const { return calls_.load(); }

protected:
    void count_call() { ++calls_; }

private:
    std::atomic<uint64_t> calls_{0};
};

// ---------------------------------------------------------------------------
// Scripted backend: substring-matching fixture rules, first match wins.
// Rule format (JSONL): {"match": {"template": str, "contains": [str]}, "response": str}
// ---------------------------------------------------------------------------

class ScriptedBackend final : public LlmBackend {
public:
    struct Rule {
        std::string template_name;  // empty = any template
        std::vector<std::string> contains;
        std::string response;
    };

    ScriptedBackend() = default;
    explicit ScriptedBackend(std::vector<Rule> rules) : rules_(std::move(rules)) {}

    static ScriptedBackend from_jsonl(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::IoError, "cannot open fixture: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return from_jsonl_text(ss.str());
    }

    static ScriptedBackend from_jsonl_text(const std::string& text) {
        std::vector<Rule> rules;
        for (const auto& line : split_lines(text)) {
            auto trimmed = trim_view(line);
            if (trimmed.empty()) continue;
            nlohmann::json j = nlohmann::json::parse(trimmed, nullptr, false);
            if (j.is_discarded() || !j.is_object())
                throw Error(ErrorCode::IoError, "bad fixture rule: " + std::string(trimmed));
            Rule r;
            if (j.contains("match")) {
                const auto& m = j["match"];
                r.template_name = m.value("template", "");
                if (m.contains("contains"))
                    for (const auto& c : m["contains"]) r.contains.push_back(c.get<std::string>());
            }
            r.response = j.value("response", "");
            rules.push_back(std::move(r));
        }
        return ScriptedBackend(std::move(rules));
    }

    void add_rule(Rule r) { rules_.push_back(std::move(r)); }

    std::string complete(const RenderedRequest& request, const GenerationConfig&) override {
        count_call();
        std::string haystack = request.flat();
        for (const auto& r : rules_) {
            if (!r.template_name.empty() && r.template_name != request.template_name) continue;
            bool ok = true;
            for (const auto& needle : r.contains)
                if (haystack.find(needle) == std::string::npos) ok = false;
            if (ok) return r.response;
        }
        return "";
    }

    std::string id() const override { return "scripted"; }

private:
    std::vector<Rule> rules_;
};

// ---------------------------------------------------------------------------
// Response cache: in-memory map mirrored to an append-only file.
// File format: "CACHE v1" header, then "H <hex-key> <base64(response)>" lines.
// ---------------------------------------------------------------------------

class CompletionCache {
public:
    CompletionCache() = default;

    explicit CompletionCache(std::string path) : path_(std::move(path)) {
        if (path_.empty()) return;
        std::ifstream in(path_, std::ios::binary);
        if (!in) return;  // fresh cache file, created on first store
        std::string line;
        if (!std::getline(in, line) || line != "CACHE v1")
            throw Error(ErrorCode::CorruptSnapshot, "bad cache header in " + path_);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (line.size() < 2 || line[0] != 'H' || line[1] != ' ')
                throw Error(ErrorCode::CorruptSnapshot, "bad cache record in " + path_);
            size_t sp = line.find(' ', 2);
            if (sp == std::string::npos)
                throw Error(ErrorCode::CorruptSnapshot, "bad cache record in " + path_);
            std::string value;
            if (!base64_decode(line.substr(sp + 1), value))
                throw Error(ErrorCode::CorruptSnapshot, "bad cache value in " + path_);
            entries_[line.substr(2, sp - 2)] = std::move(value);
        }
    }

    std::optional<std::string> get(const std::string& key) const {
        std::lock_guard lock(mutex_);
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    void put(const std::string& key, const std::string& value) {
        std::lock_guard lock(mutex_);
        if (entries_.count(key)) return;
        entries_[key] = value;
        if (path_.empty()) return;
        bool fresh = !file_opened_;
        std::ofstream out(path_, std::ios::binary | std::ios::app);
        if (!out) throw Error(ErrorCode::IoError, "cannot append cache: " + path_);
        if (fresh && out.tellp() == 0) out << "CACHE v1\n";
        file_opened_ = true;
        out << "H " << key << ' ' << base64_encode(value) << '\n';
    }

    size_t size() const {
        std::lock_guard lock(mutex_);
        return entries_.size();
    }

private:
    std::string path_;
    mutable std::mutex mutex_;
    std::map<std::string, std::string> entries_;
    bool file_opened_ = false;
};

// ---------------------------------------------------------------------------
// Gateway
// ---------------------------------------------------------------------------

class LlmGateway {
public:
    LlmGateway(std::shared_ptr<LlmBackend> backend, std::string cache_path = "")
        : backend_(std::move(backend)),
          cache_(std::make_shared<CompletionCache>(std::move(cache_path))),
          templates_(&default_templates()) {}

    std::string complete(const ChatRequest& request) {
        RenderedRequest rendered = render(request);
        const PromptTemplate& tpl = template_for(request.template_name);
        std::string key = sha256_hex(backend_->id() + "\x1f" + tpl.hash() + "\x1f" +
                                     request.config.key_material() + "\x1f" + rendered.system +
                                     "\x1f" + rendered.user + "\x1f" + rendered.assistant_prefix);
        if (auto hit = cache_->get(key)) return *hit;

        std::shared_future<std::string> fut;
        bool owner = false;
        {
            std::lock_guard lock(inflight_mutex_);
            if (auto hit = cache_->get(key)) return *hit;
            auto it = inflight_.find(key);
            if (it == inflight_.end()) {
                std::promise<std::string> p;
                fut = p.get_future().share();
                inflight_.emplace(key, fut);
                pending_.emplace(key, std::move(p));
                owner = true;
            } else {
                fut = it->second;
            }
        }
        if (!owner) return fut.get();  // rethrows the owner's error, if any

        try {
            std::string response = backend_->complete(rendered, request.config);
            cache_->put(key, response);
            settle(key, response, nullptr);
            return response;
        } catch (...) {
            settle(key, "", std::current_exception());
            throw;
        }
    }

    RenderedRequest render(const ChatRequest& request) const {
        const PromptTemplate& tpl = template_for(request.template_name);
        RenderedRequest r;
        r.template_name = tpl.name;
        r.system = render_placeholders(tpl.system, request.bindings);
        r.user = render_placeholders(tpl.user, request.bindings);
        r.assistant_prefix = render_placeholders(tpl.assistant_prefix, request.bindings);
        return r;
    }

    LlmBackend& backend() { return *backend_; }
    const LlmBackend& backend() const { return *backend_; }
    const CompletionCache& cache() const { return *cache_; }

private:
    const PromptTemplate& template_for(const std::string& name) const {
        auto it = templates_->find(name);
        if (it == templates_->end()) throw Error(ErrorCode::UnknownTemplate, name);
        return it->second;
    }

    void settle(const std::string& key, const std::string& value, std::exception_ptr err) {
        std::lock_guard lock(inflight_mutex_);
        auto pit = pending_.find(key);
        if (pit != pending_.end()) {
            if (err)
                pit->second.set_exception(err);
            else
                pit->second.set_value(value);
            pending_.erase(pit);
        }
        inflight_.erase(key);
    }

    std::shared_ptr<LlmBackend> backend_;
    std::shared_ptr<CompletionCache> cache_;
    const std::map<std::string, PromptTemplate>* templates_;
    std::mutex inflight_mutex_;
    std::map<std::string, std::shared_future<std::string>> inflight_;
    std::map<std::string, std::promise<std::string>> pending_;
};

// ---------------------------------------------------------------------------
// Structured-output parsing
// ---------------------------------------------------------------------------

// First standalone token among {true, yes} / {false, no}, case-insensitive.
inline bool parse_bool(std::string_view text) {
    for (const auto& tok : tokenize(text)) {
        if (tok == "true" || tok == "yes") return true;
        if (tok == "false" || tok == "no") return false;
    }
    throw Error(ErrorCode::UnparsableBool, std::string(trim_view(text)).substr(0, 64));
}

namespace detail {

// Strips "- ", "* ", "N." and "N)" enumeration markers from a trimmed line.
inline std::string_view strip_bullet(std::string_view line) {
    if (!line.empty() && (line[0] == '-' || line[0] == '*')) {
        auto rest = line.substr(1);
        if (rest.empty() || rest[0] == ' ' || rest[0] == '\t') return trim_view(rest);
        return line;
    }
    size_t d = 0;
    while (d < line.size() && line[d] >= '0' && line[d] <= '9') ++d;
    if (d > 0 && d < line.size() && (line[d] == '.' || line[d] == ')'))
        return trim_view(line.substr(d + 1));
    return line;
}

}  // namespace detail

// Newline-separated enumeration: bullets stripped, empties dropped, order kept.
inline std::vector<std::string> parse_list(std::string_view text) {
    std::vector<std::string> out;
    for (const auto& line : split_lines(text)) {
        auto item = detail::strip_bullet(trim_view(line));
        if (!item.empty()) out.emplace_back(item);
    }
    return out;
}

struct ParsedTriples {
    std::vector<std::array<std::string, 3>> triples;
    size_t skipped = 0;
};

// Accepts "s | p | o" and "(s | p | o)" lines; anything else non-blank is
// counted as skipped, never fatal.
inline ParsedTriples parse_triples(std::string_view text) {
    ParsedTriples out;
    for (const auto& raw : split_lines(text)) {
        auto line = detail::strip_bullet(trim_view(raw));
        if (line.empty()) continue;
        if (line.size() >= 2 && line.front() == '(' && line.back() == ')')
            line = trim_view(line.substr(1, line.size() - 2));
        std::vector<std::string> parts;
        size_t start = 0;
        while (start <= line.size()) {
            size_t bar = line.find('|', start);
            if (bar == std::string_view::npos) {
                parts.emplace_back(trim_view(line.substr(start)));
                break;
            }
            parts.emplace_back(trim_view(line.substr(start, bar - start)));
            start = bar + 1;
        }
        if (parts.size() == 3 && !parts[0].empty() && !parts[1].empty() && !parts[2].empty())
            out.triples.push_back({std::move(parts[0]), std::move(parts[1]), std::move(parts[2])});
        else
            ++out.skipped;
    }
    return out;
}

}  // namespace graphmind

#pragma once
// Plan-driven question answering over the memory graph: preprocessing,
// iterative plan execution with entity matching, clue-query traversal,
// relevance filtering, summarization, sufficiency checking and optional plan
// enhancement, then final aggregation across sub-questions.
//
// Sub-questions and clue queries run in parallel; results land in their slot
// by index so traces are byte-reproducible under a scripted backend.

#include <future>
#include <map>
#include <memory>
#include <queue>
#include <semaphore>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphmind/llmio.hpp"
#include "graphmind/memgraph.hpp"
#include "graphmind/traverse.hpp"
#include "graphmind/vecindex.hpp"

namespace graphmind {

struct PipelineConfig {
    int max_steps = 8;              // S_m
    int max_clue_queries = 4;       // C_m
    int max_vertex_matches = 3;     // V_m
    int max_filtered_triples = 25;  // F_m
    bool enable_preprocess = false;
    bool enable_plan_enhancement = true;
    Combo combo = Combo::BeamWater;
    Restriction restriction;  // vertex kinds allowed during traversal
    // edge kinds whose triples may reach the answering LLM; episodic triples
    // are discarded at the filtering stage by default
    std::set<EdgeKind> accepted_answer_edge_kinds = {EdgeKind::Simple, EdgeKind::HyperThesis};
    TraversalConfigs traversal;
    int parallelism = 0;  // 0: one worker per task

    bool operator==(const PipelineConfig&) const = default;
};

struct SearchPlan {
    std::vector<std::string> steps;
    size_t cursor = 1;                      // 1-based index of the active step
    std::vector<std::string> step_answers;  // SA, one entry per done step

    const std::string& current_step() const { return steps[cursor - 1]; }
    size_t done_count() const { return step_answers.size(); }
};

struct EntityRow {
    std::string entity;
    std::vector<std::pair<VertexId, double>> candidates;  // score-desc
};

using CandidateMatrix = std::vector<EntityRow>;

struct VertexGroup {
    std::vector<VertexId> vertices;  // one per entity row
    std::vector<size_t> ranks;       // candidate index per row
    double score = 0.0;
};

struct ClueQuery {
    std::string text;
    size_t step_index = 0;
    std::vector<VertexId> vertex_group;
};

struct AnswerResult {
    std::string answer;
    nlohmann::json trace;
};

// Thrown on hard backend failure; carries whatever trace was built.
class PipelineError : public Error {
public:
    PipelineError(const Error& cause, nlohmann::json partial_trace)
        : Error(cause.code(), cause.what()), trace_(std::move(partial_trace)) {}
    const nlohmann::json& partial_trace() const { return trace_; }

private:
    nlohmann::json trace_;
};

namespace detail {

inline std::string render_numbered(const std::vector<std::string>& items) {
    std::string out;
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out.push_back('\n');
        out += std::to_string(i + 1) + ". " + items[i];
    }
    return out;
}

// Ordered parallel map with a bounded worker count.
template <typename T, typename F>
auto parallel_map(const std::vector<T>& items, int width, F&& fn)
    -> std::vector<decltype(fn(items[0]))> {
    using R = decltype(fn(items[0]));
    if (items.empty()) return {};
    size_t effective = width <= 0 ? items.size() : std::min(size_t(width), items.size());
    if (effective <= 1 || items.size() == 1) {
        std::vector<R> out;
        out.reserve(items.size());
        for (const auto& item : items) out.push_back(fn(item));
        return out;
    }
    auto gate = std::make_shared<std::counting_semaphore<>>(std::ptrdiff_t(effective));
    std::vector<std::future<R>> futures;
    futures.reserve(items.size());
    for (const auto& item : items) {
        futures.push_back(std::async(std::launch::async, [&fn, &item, gate] {
            gate->acquire();
            struct Release {
                std::counting_semaphore<>* s;
                ~Release() { s->release(); }
            } release{gate.get()};
            return fn(item);
        }));
    }
    std::vector<R> out;
    out.reserve(items.size());
    for (auto& f : futures) out.push_back(f.get());
    return out;
}

}  // namespace detail

class Pipeline {
public:
    Pipeline(const MemoryGraph& graph, const VecIndex& index, LlmGateway& llm,
             PipelineConfig config)
        : graph_(graph), index_(index), llm_(llm), cfg_(std::move(config)) {}

    const PipelineConfig& config() const { return cfg_; }

    // ---- stage one: question preprocessing --------------------------------

    std::vector<std::string> preprocess_question(const std::string& question,
                                                 nlohmann::json* trace = nullptr) {
        if (!cfg_.enable_preprocess) {
            if (trace) (*trace)["enabled"] = false;
            return {question};
        }
        auto chain = [&](const char* tpl, const std::string& text) {
            std::string out = trim(ask(tpl, {{"question", text}}));
            return out.empty() ? text : out;  // blank edits keep the previous text
        };
        std::string denoised = chain("denoise_grammar", chain("denoise_stopwords", question));
        std::string enhanced = chain("enhance_grammar",
                                     chain("enhance_terms", chain("enhance_expand", denoised)));
        bool composite = false;
        try {
            composite = parse_bool(ask("decompose_cls", {{"question", enhanced}}));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::UnparsableBool) throw;
        }
        std::vector<std::string> subs;
        if (composite) subs = parse_list(ask("decompose", {{"question", enhanced}}));
        if (subs.empty()) subs = {enhanced};
        if (trace) {
            (*trace)["enabled"] = true;
            (*trace)["denoised"] = denoised;
            (*trace)["enhanced"] = enhanced;
            (*trace)["composite"] = composite;
        }
        return subs;
    }

    // ---- plan management ----------------------------------------------------

    SearchPlan init_plan(const std::string& question) {
        SearchPlan plan;
        plan.steps = parse_list(ask("plan_init", {{"question", question}}));
        if (plan.steps.size() > size_t(cfg_.max_steps)) plan.steps.resize(size_t(cfg_.max_steps));
        if (plan.steps.empty()) plan.steps = {question};
        return plan;
    }

    std::vector<std::string> extract_entities(const std::string& step) {
        auto raw = parse_list(ask("entity_extract", {{"step", step}}));
        std::vector<std::string> out;
        std::set<std::string> seen;
        for (auto& e : raw)
            if (seen.insert(to_lower_ascii(e)).second) out.push_back(std::move(e));
        return out;
    }

    CandidateMatrix match_entities_to_vertices(const std::vector<std::string>& entities) {
        if (!index_.has_namespace(kObjectsNamespace))
            throw Error(ErrorCode::EmptyIndex, kObjectsNamespace);
        CandidateMatrix matrix;
        for (const auto& entity : entities) {
            EntityRow row;
            row.entity = entity;
            for (const auto& hit :
                 index_.hybrid_search(kObjectsNamespace, entity, size_t(cfg_.max_vertex_matches)))
                row.candidates.emplace_back(VertexId{std::stoull(hit.doc_id)}, hit.score);
            if (!row.candidates.empty()) matrix.push_back(std::move(row));
        }
        return matrix;
    }

    // Best-first enumeration of one-candidate-per-row groups, ordered by
    // summed match score (ties: lexicographic candidate ranks), first C_m.
    static std::vector<VertexGroup> linear_combination(const CandidateMatrix& matrix, int limit) {
        std::vector<VertexGroup> out;
        if (matrix.empty() || limit <= 0) return out;

        auto group_for = [&](const std::vector<size_t>& ranks) {
            VertexGroup g;
            g.ranks = ranks;
            for (size_t i = 0; i < ranks.size(); ++i) {
                g.vertices.push_back(matrix[i].candidates[ranks[i]].first);
                g.score += matrix[i].candidates[ranks[i]].second;
            }
            return g;
        };
        auto better = [](const VertexGroup& a, const VertexGroup& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.ranks < b.ranks;
        };
        auto heap_cmp = [&](const VertexGroup& a, const VertexGroup& b) { return better(b, a); };

        std::priority_queue<VertexGroup, std::vector<VertexGroup>, decltype(heap_cmp)> heap(
            heap_cmp);
        std::set<std::vector<size_t>> seen;
        std::vector<size_t> first(matrix.size(), 0);
        heap.push(group_for(first));
        seen.insert(first);
        while (!heap.empty() && out.size() < size_t(limit)) {
            VertexGroup g = heap.top();
            heap.pop();
            for (size_t i = 0; i < g.ranks.size(); ++i) {
                if (g.ranks[i] + 1 >= matrix[i].candidates.size()) continue;
                auto next = g.ranks;
                ++next[i];
                if (seen.insert(next).second) heap.push(group_for(next));
            }
            out.push_back(std::move(g));
        }
        return out;
    }

    std::vector<ClueQuery> gen_clue_queries(const std::string& step, size_t step_index,
                                            const std::vector<VertexGroup>& groups) {
        auto make = [&](const VertexGroup& g) {
            std::vector<std::string> names;
            for (VertexId v : g.vertices) names.push_back(graph_.vertex(v)->text);
            std::string vertices;
            for (size_t i = 0; i < names.size(); ++i) {
                if (i) vertices.push_back('\n');
                vertices += names[i];
            }
            std::string text = trim(ask("clue_query_gen", {{"step", step}, {"vertices", vertices}}));
            ClueQuery cq;
            cq.text = text.empty() ? step : text;  // blank generation falls back to the step
            cq.step_index = step_index;
            cq.vertex_group = g.vertices;
            return cq;
        };
        return detail::parallel_map(groups, cfg_.parallelism, make);
    }

    std::vector<Triple> retrieve_and_filter(const ClueQuery& cq, size_t* raw_count = nullptr) {
        std::vector<Triple> raw;
        if (cq.vertex_group.empty() || cfg_.combo == Combo::NaiveOnly) {
            raw = naive_retrieve(graph_, index_, cq.text, cfg_.traversal.naive, cfg_.restriction);
        } else {
            raw = combine_retrievals(graph_, index_, cq.text, cq.vertex_group, cfg_.combo,
                                     cfg_.traversal, cfg_.restriction);
        }
        if (raw_count) *raw_count = raw.size();
        std::vector<Triple> kept;
        for (auto& t : raw) {
            EdgeKind kind = graph_.edge_ref(t.source_edge).kind;
            if (cfg_.accepted_answer_edge_kinds.count(kind)) kept.push_back(std::move(t));
        }
        TripleScorer scorer(index_, cq.text);
        detail::sort_by_similarity(kept, scorer);
        if (kept.size() > size_t(cfg_.max_filtered_triples))
            kept.resize(size_t(cfg_.max_filtered_triples));
        return kept;
    }

    std::string gen_clue_answer(const ClueQuery& cq, const std::vector<Triple>& triples) {
        if (triples.empty()) return kNotEnoughInfo;
        std::string rendered;
        for (size_t i = 0; i < triples.size(); ++i) {
            if (i) rendered.push_back('\n');
            rendered += triples[i].render();
        }
        return ask("clue_answer_gen", {{"clue_query", cq.text}, {"triples", rendered}});
    }

    std::string summarize_step(const std::string& step, const std::vector<ClueQuery>& queries,
                               const std::vector<std::string>& clue_answers) {
        bool any_useful = false;
        for (const auto& ca : clue_answers)
            if (ca != kNotEnoughInfo) any_useful = true;
        if (!any_useful) return kNotEnoughInfo;  // no LLM call
        std::string pairs;
        for (size_t i = 0; i < clue_answers.size(); ++i) {
            if (i) pairs += "\n\n";
            pairs += "Clue query: " + queries[i].text + "\nClue answer: " + clue_answers[i];
        }
        return ask("clue_answer_summarize", {{"step", step}, {"pairs", pairs}});
    }

    bool check_sufficient(const std::string& question, const SearchPlan& plan) {
        try {
            return parse_bool(ask("answer_cls", plan_bindings(question, plan)));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::UnparsableBool) throw;
            return false;  // conservative: keep searching
        }
    }

    // Rewrites pending steps in place; done steps and SA are never touched.
    // Returns true when an enhancement was applied.
    bool enhance_plan(const std::string& question, SearchPlan& plan,
                      nlohmann::json* event = nullptr) {
        if (!cfg_.enable_plan_enhancement) return false;
        bool wanted = false;
        try {
            wanted = parse_bool(ask("plan_enhance_cls", plan_bindings(question, plan)));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::UnparsableBool) throw;
        }
        if (event) (*event)["checked"] = true;
        if (!wanted) return false;

        std::vector<std::string> done(plan.steps.begin(),
                                      plan.steps.begin() + std::ptrdiff_t(plan.cursor));
        std::vector<std::string> pending(plan.steps.begin() + std::ptrdiff_t(plan.cursor),
                                         plan.steps.end());
        auto bindings = plan_bindings(question, plan);
        bindings["done_steps"] = detail::render_numbered(done);
        bindings["pending_steps"] = detail::render_numbered(pending);
        auto new_pending = parse_list(ask("plan_enhance", bindings));
        if (new_pending.empty()) return false;  // parse failure leaves the plan unchanged

        size_t room = size_t(cfg_.max_steps) - done.size();
        if (new_pending.size() > room) new_pending.resize(room);
        plan.steps = std::move(done);
        plan.steps.insert(plan.steps.end(), new_pending.begin(), new_pending.end());
        if (event) {
            (*event)["applied"] = true;
            (*event)["new_pending"] = new_pending;
        }
        return true;
    }

    // ---- the per-sub-question loop ------------------------------------------

    AnswerResult answer_subquestion(const std::string& question) {
        nlohmann::json trace;
        trace["question"] = question;
        trace["steps"] = nlohmann::json::array();

        SearchPlan plan = init_plan(question);
        trace["initial_plan"] = plan.steps;
        trace["plan_history"] = nlohmann::json::array();
        trace["plan_history"].push_back(plan.steps);

        bool found = false;
        std::string answer;
        while (plan.cursor <= size_t(cfg_.max_steps) && plan.cursor <= plan.steps.size()) {
            nlohmann::json step_trace;
            const std::string step = plan.current_step();
            step_trace["index"] = plan.cursor;
            step_trace["step"] = step;

            auto entities = extract_entities(step);
            step_trace["extract_entities"] = entities;
            if (entities.empty()) entities = {step};  // whole-step pseudo-entity

            CandidateMatrix matrix = match_entities_to_vertices(entities);
            nlohmann::json mj = nlohmann::json::array();
            for (const auto& row : matrix) {
                nlohmann::json r;
                r["entity"] = row.entity;
                r["candidates"] = nlohmann::json::array();
                for (const auto& [vid, score] : row.candidates)
                    r["candidates"].push_back({{"vertex", vid.value},
                                               {"text", graph_.vertex(vid)->text},
                                               {"score", score}});
                mj.push_back(std::move(r));
            }
            step_trace["match_entities"] = std::move(mj);

            auto groups = linear_combination(matrix, cfg_.max_clue_queries);
            nlohmann::json gj = nlohmann::json::array();
            for (const auto& g : groups) {
                nlohmann::json one;
                one["score"] = g.score;
                one["vertices"] = nlohmann::json::array();
                for (VertexId v : g.vertices) one["vertices"].push_back(v.value);
                gj.push_back(std::move(one));
            }
            step_trace["linear_combination"] = std::move(gj);

            std::vector<ClueQuery> clue_queries;
            if (groups.empty()) {
                ClueQuery cq;
                cq.text = step;
                cq.step_index = plan.cursor;
                clue_queries.push_back(std::move(cq));
            } else {
                clue_queries = gen_clue_queries(step, plan.cursor, groups);
            }
            nlohmann::json cqj = nlohmann::json::array();
            for (const auto& cq : clue_queries) cqj.push_back(cq.text);
            step_trace["clue_queries"] = std::move(cqj);

            struct ClueOutcome {
                nlohmann::json retrieval;
                std::string answer;
            };
            auto outcomes = detail::parallel_map(
                clue_queries, cfg_.parallelism, [&](const ClueQuery& cq) {
                    ClueOutcome outcome;
                    size_t raw_count = 0;
                    auto triples = retrieve_and_filter(cq, &raw_count);
                    outcome.retrieval["raw_count"] = raw_count;
                    outcome.retrieval["filtered"] = nlohmann::json::array();
                    for (const auto& t : triples)
                        outcome.retrieval["filtered"].push_back(t.render());
                    outcome.answer = gen_clue_answer(cq, triples);
                    return outcome;
                });
            step_trace["retrieve_and_filter"] = nlohmann::json::array();
            std::vector<std::string> clue_answers;
            for (auto& o : outcomes) {
                step_trace["retrieve_and_filter"].push_back(std::move(o.retrieval));
                clue_answers.push_back(std::move(o.answer));
            }
            step_trace["clue_answers"] = clue_answers;

            std::string sa = summarize_step(step, clue_queries, clue_answers);
            plan.step_answers.push_back(sa);
            step_trace["step_answer"] = sa;

            bool sufficient = check_sufficient(question, plan);
            step_trace["sufficient"] = sufficient;

            if (sufficient) {
                answer = ask("answer_gen", plan_bindings(question, plan));
                found = true;
                trace["steps"].push_back(std::move(step_trace));
                break;
            }

            nlohmann::json event;
            event["checked"] = false;
            event["applied"] = false;
            if (enhance_plan(question, plan, &event)) trace["plan_history"].push_back(plan.steps);
            step_trace["enhancement"] = std::move(event);
            trace["steps"].push_back(std::move(step_trace));
            ++plan.cursor;
        }

        if (!found) answer = kNoAnswerStub;
        trace["final_plan"] = plan.steps;
        trace["step_answers"] = plan.step_answers;
        trace["no_answer"] = !found;
        trace["answer"] = answer;
        return {answer, std::move(trace)};
    }

    // ---- aggregation and the full pipeline -----------------------------------

    std::string aggregate_answers(const std::string& question,
                                  const std::vector<std::string>& sub_questions,
                                  const std::vector<std::string>& sub_answers) {
        if (sub_answers.size() == 1) return sub_answers[0];  // verbatim, no LLM call
        return ask("aggregate", {{"question", question},
                                 {"sub_questions", detail::render_numbered(sub_questions)},
                                 {"sub_answers", detail::render_numbered(sub_answers)}});
    }

    AnswerResult answer(const std::string& question) {
        if (graph_.vertex_count() == 0 || !index_.has_namespace(kTriplesNamespace) ||
            !index_.has_namespace(kObjectsNamespace))
            throw Error(ErrorCode::EmptyIndex, "memorize documents before asking");

        nlohmann::json trace;
        trace["question"] = question;
        trace["config"] = config_json();
        try {
            nlohmann::json prep;
            auto subs = preprocess_question(question, &prep);
            trace["preprocess"] = std::move(prep);
            trace["sub_questions"] = subs;

            auto results = detail::parallel_map(
                subs, cfg_.parallelism,
                [&](const std::string& sub) { return answer_subquestion(sub); });
            std::vector<std::string> sub_answers;
            trace["sub_traces"] = nlohmann::json::array();
            for (auto& r : results) {
                sub_answers.push_back(r.answer);
                trace["sub_traces"].push_back(std::move(r.trace));
            }
            std::string final_answer = aggregate_answers(question, subs, sub_answers);
            trace["final_answer"] = final_answer;
            return {final_answer, std::move(trace)};
        } catch (const Error& e) {
            trace["error"] = {{"code", error_code_name(e.code())}, {"message", e.what()}};
            throw PipelineError(e, std::move(trace));
        }
    }

private:
    std::string ask(const std::string& template_name,
                    std::map<std::string, std::string> bindings) {
        ChatRequest req;
        req.template_name = template_name;
        req.bindings = std::move(bindings);
        return llm_.complete(req);
    }

    std::map<std::string, std::string> plan_bindings(const std::string& question,
                                                     const SearchPlan& plan) const {
        return {{"question", question},
                {"plan", detail::render_numbered(plan.steps)},
                {"step_answers", detail::render_numbered(plan.step_answers)}};
    }

    nlohmann::json config_json() const {
        nlohmann::json j;
        j["max_steps"] = cfg_.max_steps;
        j["max_clue_queries"] = cfg_.max_clue_queries;
        j["max_vertex_matches"] = cfg_.max_vertex_matches;
        j["max_filtered_triples"] = cfg_.max_filtered_triples;
        j["preprocess"] = cfg_.enable_preprocess;
        j["plan_enhancement"] = cfg_.enable_plan_enhancement;
        j["combo"] = combo_name(cfg_.combo);
        std::string restriction;
        for (VertexKind k : cfg_.restriction.accepted) {
            if (!restriction.empty()) restriction += ",";
            restriction += vertex_kind_name(k);
        }
        j["restriction"] = restriction;
        return j;
    }

    const MemoryGraph& graph_;
    const VecIndex& index_;
    LlmGateway& llm_;
    PipelineConfig cfg_;
};

}  // namespace graphmind

#pragma once
// Prompt template registry. One template per pipeline task; placeholders use
// {name} syntax and every placeholder must be bound at render time. Templates
// are versioned and hashed so cached completions are invalidated whenever a
// template text changes.

#include <map>
#include <string>
#include <vector>

#include "graphmind/errors.hpp"
#include "graphmind/util.hpp"

namespace graphmind {

// The insufficiency marker the pipeline uses when retrieved knowledge cannot
// answer a clue query.
inline const char* kNotEnoughInfo = "<|NotEnoughtInfo|>";

// Fixed fallback answer for an exhausted search plan.
inline const char* kNoAnswerStub = "No Answer";

struct PromptTemplate {
    std::string name;
    std::string system;
    std::string user;
    std::string assistant_prefix;
    int version = 1;

    std::string hash() const {
        return sha256_hex(name + "\x1f" + std::to_string(version) + "\x1f" + system + "\x1f" +
                          user + "\x1f" + assistant_prefix);
    }
};

namespace detail {

inline bool is_placeholder_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

}  // namespace detail

// Substitutes {name} placeholders; throws UnboundPlaceholder if any remains.
inline std::string render_placeholders(const std::string& text,
                                       const std::map<std::string, std::string>& bindings) {
    std::string out;
    out.reserve(text.size());
    size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '{') {
            size_t j = i + 1;
            while (j < text.size() && detail::is_placeholder_char(text[j])) ++j;
            if (j < text.size() && text[j] == '}' && j > i + 1) {
                std::string key = text.substr(i + 1, j - i - 1);
                auto it = bindings.find(key);
                if (it == bindings.end())
                    throw Error(ErrorCode::UnboundPlaceholder, key);
                out += it->second;
                i = j + 1;
                continue;
            }
        }
        out.push_back(text[i]);
        ++i;
    }
    return out;
}

// All templates the pipeline uses, keyed by name.
inline const std::map<std::string, PromptTemplate>& default_templates() {
    static const std::map<std::string, PromptTemplate> templates = [] {
        std::map<std::string, PromptTemplate> t;
        auto add = [&](std::string name, std::string system, std::string user,
                       std::string prefix = "") {
            PromptTemplate pt;
            pt.name = name;
            pt.system = std::move(system);
            pt.user = std::move(user);
            pt.assistant_prefix = std::move(prefix);
            t.emplace(std::move(name), std::move(pt));
        };

        // --- question preprocessing -------------------------------------
        add("denoise_grammar",
            "You are a careful copy editor. Fix grammatical, syntactical and punctuational "
            "mistakes in the given text. Reply with the corrected text only.",
            "Text:\n{question}");
        add("denoise_stopwords",
            "You remove noisy, redundant and unnecessary words or phrases from the given text "
            "while preserving its meaning. Reply with the cleaned text only.",
            "Text:\n{question}");
        add("enhance_grammar",
            "You edit the given text so it follows standard grammatical rules. Reply with the "
            "edited text only.",
            "Text:\n{question}");
        add("enhance_terms",
            "You rephrase the given text using common and precise terminology. Reply with the "
            "rephrased text only.",
            "Text:\n{question}");
        add("enhance_expand",
            "You expand the given text so its meaning becomes clearer for a search engine, "
            "keeping it a single question. Reply with the expanded text only.",
            "Text:\n{question}");
        add("decompose_cls",
            "Decide whether the given question contains several independent sub-questions. "
            "Answer with exactly one word: True if it is composite, False otherwise.",
            "Question:\n{question}");
        add("decompose",
            "Split the given composite question into independent sub-questions that can be "
            "answered separately. Output one sub-question per line, numbered.",
            "Question:\n{question}");

        // --- graph exploration -------------------------------------------
        add("plan_init",
            "You prepare a search plan for answering a question from a knowledge store. Break "
            "the question into short, concrete natural-language search steps, starting from the "
            "most specific facts. Output one step per line, numbered.",
            "Question:\n{question}");
        add("entity_extract",
            "Extract the key named entities from the given search query. Output one entity per "
            "line, no commentary.",
            "Query:\n{step}");
        add("clue_query_gen",
            "Rewrite the given search step as one detailed clue query grounded in the listed "
            "knowledge-graph entities. Mention the entities explicitly. Reply with the clue "
            "query only.",
            "Search step:\n{step}\n\nEntities:\n{vertices}");
        add("clue_answer_gen",
            std::string("Answer the clue query using only the knowledge triples provided. If the "
                        "triples do not contain enough information, reply with exactly ") +
                kNotEnoughInfo + ".",
            "Clue query:\n{clue_query}\n\nTriples:\n{triples}");
        add("clue_answer_summarize",
            std::string("Summarize the clue answers below into one concise answer for the search "
                        "step. Ignore entries equal to ") + kNotEnoughInfo +
                ". If nothing useful remains, reply with exactly that marker.",
            "Search step:\n{step}\n\n{pairs}");
        add("answer_cls",
            "Given the question, the search plan and the knowledge gathered per completed step, "
            "decide whether a relevant answer can already be generated. Answer with exactly one "
            "word: True or False.",
            "Question:\n{question}\n\nPlan:\n{plan}\n\nGathered knowledge:\n{step_answers}");
        add("answer_gen",
            "Generate the final answer to the question using the gathered knowledge. Be direct "
            "and factual.",
            "Question:\n{question}\n\nPlan:\n{plan}\n\nGathered knowledge:\n{step_answers}");
        add("plan_enhance_cls",
            "Given the question, the search plan and the knowledge gathered so far, decide "
            "whether the remaining plan steps need to be rewritten to use the newly discovered "
            "knowledge. Answer with exactly one word: True or False.",
            "Question:\n{question}\n\nPlan:\n{plan}\n\nGathered knowledge:\n{step_answers}");
        add("plan_enhance",
            "Rewrite the pending steps of the search plan so they use the knowledge already "
            "gathered. Keep steps short and concrete. Output only the new pending steps, one "
            "per line, numbered.",
            "Question:\n{question}\n\nCompleted steps:\n{done_steps}\n\nGathered knowledge:\n"
            "{step_answers}\n\nPending steps to rewrite:\n{pending_steps}");

        // --- answers aggregation -------------------------------------------
        add("aggregate",
            "Combine the sub-answers into one final answer to the original question. Reply with "
            "the answer only.",
            "Question:\n{question}\n\nSub-questions:\n{sub_questions}\n\nSub-answers:\n"
            "{sub_answers}");

        // --- memorize pipeline ----------------------------------------------
        add("thesis_extract",
            "Extract self-contained factual statements (theses) from the document. For each "
            "thesis, name one entity it is about. Output one line per (entity, thesis) pair in "
            "the form: entity | states | thesis sentence. No commentary.",
            "Document:\n{document}");
        add("simple_extract",
            "Extract factual relations between named entities from the document. Output one "
            "triple per line in the form: subject | predicate | object. No commentary.",
            "Document:\n{document}");

        // --- evaluation -------------------------------------------------------
        add("judge",
            "You judge question answering. Given a question, the ground-truth answer and a "
            "generated answer, decide whether the generated answer is correct. Reply with "
            "exactly one character: 1 if correct, 0 if incorrect.",
            "Question:\n{question}\n\nGround truth:\n{gold}\n\nGenerated answer:\n{generated}");

        return t;
    }();
    return templates;
}

}  // namespace graphmind

#include "omx/pipeline.hpp"

#include <algorithm>

#include "omx/turtle.hpp"

namespace omx::pipeline {

using gateway::ChatMessage;
using gateway::Role;

namespace {

const char* kBaseSystemPrompt =
    "You are an ontology matching system. You are given a source and a target "
    "ontology module in Turtle. Find equivalent entities, including complex "
    "correspondences where one entity maps to a combination of entities, and "
    "return the partial alignment as an EDOAL XML document. Answer with the XML "
    "only.";

const char* kPatternCatalogue =
    " Consider these correspondence patterns when matching: "
    "Class Equivalence (A = B); Class Intersection (A = and(B, C)); Class Union "
    "(A = or(B, C)); Class by Attribute Type (A = property p with datatype d); "
    "Class by Attribute Value (A = property p with value v); Class by Attribute "
    "Occurrence (A = relation r occurring at least n times); Property Chain "
    "(p = compose(r, q)); Inverse Relation (r = inverse(s)).";

}  // namespace

std::string embedding_text(const OntologyGraph& graph, const Iri& iri) {
    std::string text = label_of(graph, iri);
    auto comments = graph.literal_values(iri, vocab::rdfs_comment);
    if (!comments.empty()) text += " " + comments.front();
    return text;
}

std::vector<ChatMessage> build_prompt(const OntologyModule& source,
                                      const OntologyModule& target,
                                      PromptStyle style) {
    std::string system = kBaseSystemPrompt;
    if (style == PromptStyle::Patterns) system += kPatternCatalogue;
    std::string user = "Source ontology:\n" + serialize_turtle(source.graph) +
                       "\nTarget ontology:\n" + serialize_turtle(target.graph) + "\n";
    return {{Role::System, std::move(system)}, {Role::User, std::move(user)}};
}

namespace {

std::size_t prompt_tokens(const std::vector<ChatMessage>& prompt) {
    std::string all;
    for (const auto& m : prompt) all += m.content + "\n";
    return estimate_tokens(all);
}

std::vector<Iri> eligible_entities(const std::map<Iri, EntityInfo>& index) {
    std::vector<Iri> out;
    for (const auto& [iri, info] : index)
        if (info.kind == EntityKind::Class || info.kind == EntityKind::ObjectProperty ||
            info.kind == EntityKind::DataProperty)
            out.push_back(iri);
    return out;
}

}  // namespace

PlanResult plan_tasks(const OntologyGraph& source, const OntologyGraph& target,
                      const RunConfig& cfg, gateway::Gateway& gw) {
    if (source.empty() || target.empty())
        throw std::invalid_argument("plan_tasks: empty ontology");

    auto src_index = entity_index(source);
    auto digraph = build_entity_digraph(source);
    auto scores = pagerank(digraph, 0.85, 1e-10, 200);
    auto anchors =
        top_k_anchors(scores, static_cast<std::size_t>(cfg.anchors_k), src_index);
    if (anchors.empty()) throw std::invalid_argument("plan_tasks: no eligible anchors");

    // Embed the eligible target pool once.
    auto tgt_index = entity_index(target);
    auto pool_iris = eligible_entities(tgt_index);
    std::vector<std::string> pool_texts;
    for (const auto& iri : pool_iris) pool_texts.push_back(embedding_text(target, iri));
    std::map<Iri, EmbeddingVector> pool;
    if (!pool_iris.empty()) {
        auto vectors = gw.embed(pool_texts);
        for (std::size_t i = 0; i < pool_iris.size(); ++i)
            pool[pool_iris[i]] = vectors[i];
    }

    PlanResult plan;
    for (const auto& anchor : anchors) {
        std::vector<Iri> candidates;
        if (!pool.empty()) {
            auto query = gw.embed({embedding_text(source, anchor)}).front();
            for (const auto& [iri, sim] :
                 cosine_candidates(query, pool, static_cast<std::size_t>(cfg.candidates_k)))
                candidates.push_back(iri);
        }
        if (candidates.empty()) {
            plan.warnings.push_back("no target candidates for anchor " + anchor.value);
            continue;
        }

        // Shrink hops until the prompt fits the token budget.
        bool planned = false;
        for (int hops = cfg.hops; hops >= 0; --hops) {
            MatchTask task;
            task.anchor = anchor;
            task.source_module =
                extract_module(source, {anchor}, static_cast<std::size_t>(hops),
                               static_cast<std::size_t>(cfg.superclass_depth),
                               ModuleOrigin::Source);
            task.target_module =
                extract_module(target, candidates, static_cast<std::size_t>(hops),
                               static_cast<std::size_t>(cfg.superclass_depth),
                               ModuleOrigin::Target);
            task.prompt =
                build_prompt(task.source_module, task.target_module, cfg.prompt_style);
            task.token_estimate = prompt_tokens(task.prompt);
            if (task.token_estimate <= static_cast<std::size_t>(cfg.token_budget)) {
                plan.tasks.push_back(std::move(task));
                planned = true;
                break;
            }
        }
        if (!planned)
            plan.warnings.push_back("dropped irreducibly oversized task for anchor " +
                                    anchor.value);
    }
    return plan;
}

std::vector<TaskResult> run_tasks(const std::vector<MatchTask>& tasks,
                                  gateway::Gateway& gw) {
    std::vector<TaskResult> results;
    results.reserve(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        TaskResult r;
        r.task_index = i;
        try {
            gateway::ChatRequest req;
            req.messages = tasks[i].prompt;
            r.response = gw.chat(req);
        } catch (const gateway::GatewayError&) {
            results.push_back(std::move(r));
            continue;
        }
        auto repaired = edoal::repair(r.response);
        r.repair = repaired.report;
        if (repaired.report.valid_after) {
            try {
                r.alignment = edoal::parse_alignment(repaired.text);
            } catch (const edoal::AlignmentError&) {
                // leave invalid
            }
        }
        results.push_back(std::move(r));
    }
    return results;
}

std::pair<edoal::Alignment, MatchRunReport> finalize(
    const std::vector<TaskResult>& results, const Iri& onto1, const Iri& onto2) {
    MatchRunReport report;
    report.tasks = results.size();

    std::vector<edoal::Alignment> partials;
    std::size_t total_cells = 0;
    for (const auto& r : results) {
        if (!r.alignment) {
            ++report.invalid;
            continue;
        }
        if (!r.repair.fixes.empty()) ++report.repaired;
        partials.push_back(*r.alignment);
        total_cells += r.alignment->cells.size();
    }

    auto merged = edoal::merge(partials);
    for (auto& c : merged.cells) c = edoal::normalize(c);
    if (merged.onto1.value.empty()) merged.onto1 = onto1;
    if (merged.onto2.value.empty()) merged.onto2 = onto2;

    report.final_cells = merged.cells.size();
    report.duplicates_removed = total_cells - merged.cells.size();
    return {std::move(merged), report};
}

}  // namespace omx::pipeline

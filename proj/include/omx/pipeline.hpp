#pragma once
// End-to-end matching: plan module-pair tasks, query the LLM, repair each
// partial alignment, and merge into the final EDOAL output.

#include <optional>
#include <string>
#include <vector>

#include "omx/config.hpp"
#include "omx/edoal.hpp"
#include "omx/gateway.hpp"
#include "omx/space_reduction.hpp"

namespace omx::pipeline {

struct MatchTask {
    OntologyModule source_module;
    OntologyModule target_module;
    std::vector<gateway::ChatMessage> prompt;
    std::size_t token_estimate = 0;
    Iri anchor;
};

struct PlanResult {
    std::vector<MatchTask> tasks;
    std::vector<std::string> warnings;  // dropped oversized tasks etc.
};

struct TaskResult {
    std::size_t task_index = 0;
    std::optional<edoal::Alignment> alignment;
    std::string response;
    edoal::RepairReport repair;
};

struct MatchRunReport {
    std::size_t tasks = 0;
    std::size_t repaired = 0;
    std::size_t invalid = 0;
    std::size_t final_cells = 0;
    std::size_t duplicates_removed = 0;
};

// Prompt construction is exposed so fixtures can be computed ahead of a run.
std::vector<gateway::ChatMessage> build_prompt(const OntologyModule& source,
                                               const OntologyModule& target,
                                               PromptStyle style);

PlanResult plan_tasks(const OntologyGraph& source, const OntologyGraph& target,
                      const RunConfig& cfg, gateway::Gateway& gw);

std::vector<TaskResult> run_tasks(const std::vector<MatchTask>& tasks,
                                  gateway::Gateway& gw);

std::pair<edoal::Alignment, MatchRunReport> finalize(
    const std::vector<TaskResult>& results, const Iri& onto1 = {},
    const Iri& onto2 = {});

// Embedding input text: label + first comment.
std::string embedding_text(const OntologyGraph& graph, const Iri& iri);

}  // namespace omx::pipeline

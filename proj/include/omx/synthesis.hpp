#pragma once
// Synthetic fine-tuning corpus factory: fill masked templates, generate the
// ontology pair behind each alignment, and package chat-format JSONL records.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "omx/edoal.hpp"
#include "omx/gateway.hpp"
#include "omx/grammar.hpp"
#include "omx/rdf.hpp"

namespace omx::synthesis {

struct SynthRecord {
    std::vector<gateway::ChatMessage> messages;  // system + user (the two ontologies)
    std::string target;                          // EDOAL alignment XML
    enum class Kind { Positive, Empty } kind = Kind::Positive;
    bool valid = false;
    bool warning = false;  // empty pair with overlapping local names
};

struct CorpusManifest {
    std::size_t total = 0;
    std::size_t positives = 0;
    std::size_t empties = 0;
    double valid_rate = 0.0;
    std::pair<std::uint64_t, std::uint64_t> seed_range{0, 0};
};

// Prompt builders are public so deterministic mock fixtures can be prepared.
std::vector<gateway::ChatMessage> fill_prompt(const grammar::AlignmentTemplate& t);
std::vector<gateway::ChatMessage> ontology_prompt(const std::string& alignment_xml,
                                                  int side);
std::vector<gateway::ChatMessage> empty_ontology_prompt(std::uint64_t seed, int side);
std::vector<gateway::ChatMessage> matching_messages(const OntologyGraph& onto1,
                                                    const OntologyGraph& onto2);

// Derivation parameters for record i of a corpus run: template seed and cell
// count (uniform in 1..5).
struct RecordPlan {
    std::uint64_t seed = 0;
    std::size_t cells = 1;
    std::size_t max_depth = 3;
    bool operator==(const RecordPlan&) const = default;
};
RecordPlan record_plan(std::uint64_t seed0, std::size_t index);

struct FillResult {
    std::optional<edoal::Alignment> alignment;
    edoal::RepairReport repair;
    std::string raw;
};

FillResult fill_template(const grammar::AlignmentTemplate& t, gateway::Gateway& gw);

struct PairResult {
    std::optional<OntologyGraph> onto1;
    std::optional<OntologyGraph> onto2;
    std::size_t injected = 0;  // missing alignment entities declared explicitly
};

PairResult generate_ontology_pair(const edoal::Alignment& a, gateway::Gateway& gw);

SynthRecord generate_positive(std::uint64_t seed0, std::size_t index,
                              gateway::Gateway& gw);
SynthRecord generate_empty_pair(std::uint64_t seed, gateway::Gateway& gw);

CorpusManifest build_corpus(std::size_t n_pos, std::size_t n_neg, std::uint64_t seed0,
                            gateway::Gateway& gw, const std::string& out_dir);

// Default corpus split: positives:empties = 4650:2000 scaled to the total.
std::pair<std::size_t, std::size_t> default_split(std::size_t total);

}  // namespace omx::synthesis

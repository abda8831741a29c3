#pragma once
// Search space reduction: PageRank anchor selection, embedding-based candidate
// retrieval, and bounded module extraction around anchors.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "omx/rdf.hpp"

namespace omx {

struct EntityScore {
    Iri iri;
    double score = 0.0;
};

struct EmbeddingVector {
    std::vector<double> values;
    std::size_t dim() const { return values.size(); }
    double norm() const;
};

enum class ModuleOrigin { Source, Target };

struct OntologyModule {
    OntologyGraph graph;
    std::vector<Iri> anchors;
    ModuleOrigin origin = ModuleOrigin::Source;
};

// Directed graph over entity IRIs: one edge subject -> object per triple whose
// object is an IRI. Predicates are not nodes.
struct EntityDigraph {
    std::vector<Iri> nodes;                      // sorted, unique
    std::vector<std::vector<std::size_t>> out;   // adjacency, deduplicated

    std::size_t size() const { return nodes.size(); }
};

EntityDigraph build_entity_digraph(const OntologyGraph& graph);

// Power iteration with uniform teleport; dangling mass redistributed uniformly.
// Scores sum to 1.
std::vector<EntityScore> pagerank(const EntityDigraph& digraph, double damping,
                                  double eps, std::size_t max_iter);

// Highest-scoring class/property IRIs; ties broken by lexicographic IRI.
std::vector<Iri> top_k_anchors(const std::vector<EntityScore>& scores, std::size_t k,
                               const std::map<Iri, EntityInfo>& index);

// Descending cosine similarity; ties broken by IRI; length min(k, |pool|).
std::vector<std::pair<Iri, double>> cosine_candidates(
    const EmbeddingVector& query, const std::map<Iri, EmbeddingVector>& pool,
    std::size_t k);

// Bounded neighborhood module per the filtering rules: no blank-node objects,
// typeless standard-vocabulary entities dropped, superclass chain capped.
OntologyModule extract_module(const OntologyGraph& graph, const std::vector<Iri>& anchors,
                              std::size_t hops, std::size_t superclass_depth,
                              ModuleOrigin origin = ModuleOrigin::Source);

// Deterministic whitespace+punctuation token count used for prompt budgeting.
std::size_t estimate_tokens(const std::string& text);

}  // namespace omx

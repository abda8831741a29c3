#include "omx/space_reduction.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>

namespace omx {

double EmbeddingVector::norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

EntityDigraph build_entity_digraph(const OntologyGraph& graph) {
    std::set<Iri> node_set;
    for (const auto& t : graph.triples()) {
        if (auto* s = std::get_if<Iri>(&t.subject)) node_set.insert(*s);
        if (auto* o = std::get_if<Iri>(&t.object)) node_set.insert(*o);
    }
    EntityDigraph dg;
    dg.nodes.assign(node_set.begin(), node_set.end());
    std::map<Iri, std::size_t> index;
    for (std::size_t i = 0; i < dg.nodes.size(); ++i) index[dg.nodes[i]] = i;
    std::vector<std::set<std::size_t>> adj(dg.nodes.size());
    for (const auto& t : graph.triples()) {
        auto* s = std::get_if<Iri>(&t.subject);
        auto* o = std::get_if<Iri>(&t.object);
        if (s && o) adj[index[*s]].insert(index[*o]);
    }
    dg.out.resize(adj.size());
    for (std::size_t i = 0; i < adj.size(); ++i)
        dg.out[i].assign(adj[i].begin(), adj[i].end());
    return dg;
}

std::vector<EntityScore> pagerank(const EntityDigraph& digraph, double damping,
                                  double eps, std::size_t max_iter) {
    const std::size_t n = digraph.size();
    if (n == 0) throw std::invalid_argument("pagerank on empty graph");
    std::vector<double> rank(n, 1.0 / static_cast<double>(n));
    std::vector<double> next(n);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        double dangling = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (digraph.out[i].empty()) dangling += rank[i];
        double base = (1.0 - damping) / static_cast<double>(n) +
                      damping * dangling / static_cast<double>(n);
        std::fill(next.begin(), next.end(), base);
        for (std::size_t i = 0; i < n; ++i) {
            if (digraph.out[i].empty()) continue;
            double share = damping * rank[i] / static_cast<double>(digraph.out[i].size());
            for (std::size_t j : digraph.out[i]) next[j] += share;
        }
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) delta += std::abs(next[i] - rank[i]);
        rank.swap(next);
        if (delta < eps) break;
    }
    std::vector<EntityScore> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = {digraph.nodes[i], rank[i]};
    return out;
}

std::vector<Iri> top_k_anchors(const std::vector<EntityScore>& scores, std::size_t k,
                               const std::map<Iri, EntityInfo>& index) {
    std::vector<EntityScore> eligible;
    for (const auto& s : scores) {
        auto it = index.find(s.iri);
        if (it == index.end()) continue;
        auto kind = it->second.kind;
        if (kind == EntityKind::Class || kind == EntityKind::ObjectProperty ||
            kind == EntityKind::DataProperty)
            eligible.push_back(s);
    }
    std::sort(eligible.begin(), eligible.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.iri < b.iri;
    });
    if (eligible.size() > k) eligible.resize(k);
    std::vector<Iri> out;
    out.reserve(eligible.size());
    for (const auto& s : eligible) out.push_back(s.iri);
    return out;
}

std::vector<std::pair<Iri, double>> cosine_candidates(
    const EmbeddingVector& query, const std::map<Iri, EmbeddingVector>& pool,
    std::size_t k) {
    if (k == 0) throw std::invalid_argument("k must be >= 1");
    double qn = query.norm();
    if (qn == 0.0) throw std::invalid_argument("zero-norm query vector");
    std::vector<std::pair<Iri, double>> scored;
    scored.reserve(pool.size());
    for (const auto& [iri, vec] : pool) {
        if (vec.dim() != query.dim())
            throw std::invalid_argument("embedding dimension mismatch for " + iri.value);
        double vn = vec.norm();
        if (vn == 0.0) throw std::invalid_argument("zero-norm pool vector " + iri.value);
        double dot = std::inner_product(query.values.begin(), query.values.end(),
                                        vec.values.begin(), 0.0);
        scored.emplace_back(iri, dot / (qn * vn));
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

namespace {

bool standard_vocab(const Iri& iri) {
    return iri.value.starts_with("http://www.w3.org") ||
           iri.value.starts_with("http://ns.inria.org/edoal/");
}

}  // namespace

OntologyModule extract_module(const OntologyGraph& graph, const std::vector<Iri>& anchors,
                              std::size_t hops, std::size_t superclass_depth,
                              ModuleOrigin origin) {
    if (anchors.empty()) throw std::invalid_argument("extract_module: no anchors");
    for (const auto& a : anchors)
        if (!graph.mentions(a))
            throw std::invalid_argument("anchor not present in graph: " + a.value);

    std::set<Iri> typed;
    for (const auto& t : graph.triples())
        if (t.predicate == vocab::rdf_type)
            if (auto* s = std::get_if<Iri>(&t.subject)) typed.insert(*s);

    auto keep_entity = [&](const Iri& e) {
        return typed.count(e) > 0 || !standard_vocab(e);
    };

    // Undirected BFS over IRI-to-IRI triples, not expanding through filtered
    // entities.
    std::set<Iri> included(anchors.begin(), anchors.end());
    std::deque<std::pair<Iri, std::size_t>> frontier;
    for (const auto& a : anchors) frontier.emplace_back(a, 0);
    while (!frontier.empty()) {
        auto [node, depth] = frontier.front();
        frontier.pop_front();
        if (depth >= hops) continue;
        for (const auto& t : graph.triples()) {
            auto* s = std::get_if<Iri>(&t.subject);
            auto* o = std::get_if<Iri>(&t.object);
            if (!s || !o || t.predicate == vocab::rdf_type) continue;
            const Iri* next = nullptr;
            if (*s == node) next = o;
            else if (*o == node) next = s;
            if (!next || included.count(*next) || !keep_entity(*next)) continue;
            included.insert(*next);
            frontier.emplace_back(*next, depth + 1);
        }
    }

    // Superclass chains: up to superclass_depth ancestors per anchor.
    for (const auto& a : anchors) {
        Iri current = a;
        for (std::size_t level = 0; level < superclass_depth; ++level) {
            auto parents = graph.objects(Subject{current}, vocab::rdfs_subclassof);
            const Iri* parent = nullptr;
            for (const auto& p : parents)
                if (auto* i = std::get_if<Iri>(&p)) {
                    parent = i;
                    break;
                }
            if (!parent || !keep_entity(*parent)) break;
            included.insert(*parent);
            current = *parent;
        }
    }

    OntologyModule mod;
    mod.anchors = anchors;
    mod.origin = origin;
    for (const auto& [name, ns] : graph.prefixes()) mod.graph.add_prefix(name, ns);

    for (const auto& t : graph.triples()) {
        auto* s = std::get_if<Iri>(&t.subject);
        if (!s || !included.count(*s)) continue;
        if (std::holds_alternative<BlankNode>(t.object)) continue;
        if (t.predicate == vocab::rdf_type) {
            mod.graph.add(t);
            continue;
        }
        if (t.predicate == vocab::rdfs_subclassof) {
            if (auto* o = std::get_if<Iri>(&t.object); o && included.count(*o))
                mod.graph.add(t);
            continue;
        }
        if (auto* o = std::get_if<Iri>(&t.object)) {
            if (included.count(*o)) mod.graph.add(t);
            continue;
        }
        mod.graph.add(t);  // literal object: labels, comments, data values
    }
    return mod;
}

std::size_t estimate_tokens(const std::string& text) {
    auto word_char = [](unsigned char c) { return std::isalnum(c) || c == '_'; };
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = text[i];
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        bool word = word_char(c);
        ++count;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
               word_char(static_cast<unsigned char>(text[i])) == word)
            ++i;
    }
    return count;
}

}  // namespace omx

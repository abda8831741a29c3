#include "omx/rdf.hpp"

#include <algorithm>
#include <cctype>

namespace omx {

bool Iri::is_absolute() const {
    if (value.empty()) return false;
    auto colon = value.find(':');
    if (colon == std::string::npos || colon == 0) return false;
    for (char c : value)
        if (std::isspace(static_cast<unsigned char>(c))) return false;
    // Scheme must start with a letter.
    return std::isalpha(static_cast<unsigned char>(value[0])) != 0;
}

std::string Iri::local_name() const {
    auto pos = value.find_last_of("#/");
    if (pos == std::string::npos || pos + 1 >= value.size()) return value;
    return value.substr(pos + 1);
}

void OntologyGraph::add_prefix(const std::string& name, const Iri& ns) {
    prefixes_[name] = ns;
}

std::vector<RdfTerm> OntologyGraph::objects(const Subject& s, const Iri& p) const {
    std::vector<RdfTerm> out;
    for (const auto& t : triples_)
        if (t.subject == s && t.predicate == p) out.push_back(t.object);
    return out;
}

std::vector<std::string> OntologyGraph::literal_values(const Iri& s, const Iri& p) const {
    std::vector<std::string> out;
    for (const auto& term : objects(Subject{s}, p))
        if (auto* lit = std::get_if<Literal>(&term)) out.push_back(lit->lexical);
    return out;
}

bool OntologyGraph::mentions(const Iri& iri) const {
    for (const auto& t : triples_) {
        if (t.predicate == iri) return true;
        if (auto* s = std::get_if<Iri>(&t.subject); s && *s == iri) return true;
        if (auto* o = std::get_if<Iri>(&t.object); o && *o == iri) return true;
    }
    return false;
}

std::map<Iri, EntityInfo> entity_index(const OntologyGraph& graph) {
    std::map<Iri, EntityInfo> index;
    for (const auto& t : graph.triples()) {
        auto* s = std::get_if<Iri>(&t.subject);
        if (!s) continue;
        auto& info = index[*s];
        info.iri = *s;
        if (t.predicate == vocab::rdf_type) {
            if (auto* type = std::get_if<Iri>(&t.object)) {
                if (*type == vocab::owl_class || *type == vocab::rdfs_class)
                    info.kind = EntityKind::Class;
                else if (*type == vocab::owl_object_property)
                    info.kind = EntityKind::ObjectProperty;
                else if (*type == vocab::owl_datatype_property)
                    info.kind = EntityKind::DataProperty;
                else if (*type == vocab::owl_named_individual)
                    info.kind = EntityKind::Individual;
            }
        } else if (t.predicate == vocab::rdfs_label) {
            if (auto* lit = std::get_if<Literal>(&t.object)) {
                if (std::find(info.labels.begin(), info.labels.end(), lit->lexical) ==
                    info.labels.end())
                    info.labels.push_back(lit->lexical);
            }
        } else if (t.predicate == vocab::rdfs_comment) {
            if (auto* lit = std::get_if<Literal>(&t.object))
                info.comments.push_back(lit->lexical);
        }
    }
    return index;
}

std::string label_of(const OntologyGraph& graph, const Iri& iri) {
    auto labels = graph.literal_values(iri, vocab::rdfs_label);
    if (!labels.empty()) return labels.front();
    return iri.local_name();
}

}  // namespace omx

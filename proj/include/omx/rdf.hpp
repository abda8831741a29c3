#pragma once
// Core RDF model: IRIs, terms, triples, and the in-memory ontology graph.
// Graphs are immutable once built; builders return by value.

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace omx {

struct Iri {
    std::string value;

    Iri() = default;
    explicit Iri(std::string v) : value(std::move(v)) {}

    // Absolute IRI: non-empty, has a scheme separator, no whitespace.
    bool is_absolute() const;
    // Text after the last '#' or '/'.
    std::string local_name() const;

    auto operator<=>(const Iri&) const = default;
};

struct BlankNode {
    std::string id;
    auto operator<=>(const BlankNode&) const = default;
};

struct Literal {
    std::string lexical;
    std::optional<Iri> datatype;
    std::string lang;
    auto operator<=>(const Literal&) const = default;
};

using Subject = std::variant<Iri, BlankNode>;
using RdfTerm = std::variant<Iri, BlankNode, Literal>;

struct Triple {
    Subject subject;
    Iri predicate;
    RdfTerm object;
    auto operator<=>(const Triple&) const = default;
};

inline Subject to_subject(const RdfTerm& t) {
    if (auto* i = std::get_if<Iri>(&t)) return *i;
    if (auto* b = std::get_if<BlankNode>(&t)) return *b;
    throw std::invalid_argument("literal cannot be a subject");
}

inline RdfTerm to_term(const Subject& s) {
    if (auto* i = std::get_if<Iri>(&s)) return RdfTerm{*i};
    return RdfTerm{std::get<BlankNode>(s)};
}

// Well-known vocabulary IRIs.
namespace vocab {
inline const std::string rdf_ns = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline const std::string rdfs_ns = "http://www.w3.org/2000/01/rdf-schema#";
inline const std::string owl_ns = "http://www.w3.org/2002/07/owl#";
inline const std::string xsd_ns = "http://www.w3.org/2001/XMLSchema#";

inline const Iri rdf_type{rdf_ns + "type"};
inline const Iri rdfs_label{rdfs_ns + "label"};
inline const Iri rdfs_comment{rdfs_ns + "comment"};
inline const Iri rdfs_subclassof{rdfs_ns + "subClassOf"};
inline const Iri rdfs_class{rdfs_ns + "Class"};
inline const Iri owl_class{owl_ns + "Class"};
inline const Iri owl_object_property{owl_ns + "ObjectProperty"};
inline const Iri owl_datatype_property{owl_ns + "DatatypeProperty"};
inline const Iri owl_named_individual{owl_ns + "NamedIndividual"};
inline const Iri xsd_string{xsd_ns + "string"};
inline const Iri xsd_integer{xsd_ns + "integer"};
inline const Iri xsd_decimal{xsd_ns + "decimal"};
inline const Iri xsd_boolean{xsd_ns + "boolean"};
}  // namespace vocab

class OntologyGraph {
  public:
    OntologyGraph() = default;

    void add(Triple t) { triples_.insert(std::move(t)); }
    void add_prefix(const std::string& name, const Iri& ns);
    void set_base(Iri b) { base_ = std::move(b); }

    const std::set<Triple>& triples() const { return triples_; }
    const std::map<std::string, Iri>& prefixes() const { return prefixes_; }
    const std::optional<Iri>& base() const { return base_; }

    std::size_t size() const { return triples_.size(); }
    bool empty() const { return triples_.empty(); }
    bool contains(const Triple& t) const { return triples_.count(t) > 0; }

    // All objects of (subject, predicate) matches.
    std::vector<RdfTerm> objects(const Subject& s, const Iri& p) const;
    // Literal lexical forms of (subject, predicate) matches.
    std::vector<std::string> literal_values(const Iri& s, const Iri& p) const;
    // True if iri occurs in any triple position (subject, predicate, or IRI object).
    bool mentions(const Iri& iri) const;

    bool operator==(const OntologyGraph& o) const { return triples_ == o.triples_; }

  private:
    std::set<Triple> triples_;
    std::map<std::string, Iri> prefixes_;
    std::optional<Iri> base_;
};

enum class EntityKind { Class, ObjectProperty, DataProperty, Individual, Unknown };

struct EntityInfo {
    Iri iri;
    EntityKind kind = EntityKind::Unknown;
    std::vector<std::string> labels;
    std::vector<std::string> comments;
};

// One EntityInfo per IRI appearing as a subject; kind derived from rdf:type only.
std::map<Iri, EntityInfo> entity_index(const OntologyGraph& graph);

// First rdfs:label, else the IRI local name.
std::string label_of(const OntologyGraph& graph, const Iri& iri);

}  // namespace omx

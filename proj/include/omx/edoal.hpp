#pragma once
// EDOAL expression model, Alignment-format XML parsing/serialization,
// syntactic repair of LLM output, normalization, merge, and validation.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "omx/rdf.hpp"

namespace omx::edoal {

inline const std::string align_ns =
    "http://knowledgeweb.semanticweb.org/heterogeneity/alignment#";
inline const std::string edoal_ns = "http://ns.inria.org/edoal/1.0/";

enum class ExprKind {
    ClassId,
    PropertyId,
    RelationId,
    InstanceId,
    And,
    Or,
    Not,
    Compose,
    Inverse,
    AttrDomainRestriction,
    AttrTypeRestriction,
    AttrValueRestriction,
    AttrOccurenceRestriction,
};

// Context decides which EDOAL container element And/Or/Not/Compose live in.
enum class ExprContext { Class, Property, Relation, Instance };

struct Expression {
    ExprKind kind = ExprKind::ClassId;
    ExprContext ctx = ExprContext::Class;
    Iri id;          // Id variants; datatype IRI for AttrTypeRestriction
    Iri comparator;  // value / occurrence restrictions
    std::string value;    // AttrValueRestriction literal
    long cardinality = 0;  // AttrOccurenceRestriction
    std::vector<Expression> children;

    bool is_atomic() const;
    bool operator==(const Expression&) const = default;
};

enum class Relation { Equivalence, Subsumes, SubsumedBy };

std::string relation_symbol(Relation r);

struct Correspondence {
    Expression entity1;
    Expression entity2;
    Relation relation = Relation::Equivalence;
    double measure = 1.0;
    bool operator==(const Correspondence&) const = default;
};

struct Alignment {
    std::string level = "2EDOAL";
    Iri onto1;
    Iri onto2;
    std::map<std::string, std::string> prefixes;
    std::vector<Correspondence> cells;
    bool operator==(const Alignment&) const = default;
};

enum class FixKind {
    MissingPrefix,
    MissingOntologyTag,
    UnprefixedEntity,
    InvalidLiteral,
    EosToken,
    Other,
};

std::string fix_kind_name(FixKind k);

struct Fix {
    FixKind kind = FixKind::Other;
    std::string detail;
};

struct RepairReport {
    std::vector<Fix> fixes;
    bool valid_after = false;
    bool has(FixKind k) const;
};

struct RepairResult {
    std::string text;
    RepairReport report;
};

struct AlignmentError : std::runtime_error {
    explicit AlignmentError(const std::string& msg) : std::runtime_error(msg) {}
};

// Canonical textual form of an expression; total order for sorting and
// duplicate detection.
std::string canonical_text(const Expression& e);

// All atomic entity IRIs mentioned in the expression.
std::vector<Iri> atomic_iris(const Expression& e);

Alignment parse_alignment(const std::string& xml_text);
std::string serialize_alignment(const Alignment& a);

// Sort + dedupe And/Or children, collapse singletons, cancel double
// Not/Inverse. Compose order is preserved.
Expression normalize(const Expression& e);
Correspondence normalize(const Correspondence& c);

std::vector<Fix> validate(const std::string& xml_text);

RepairResult repair(const std::string& xml_text);

Alignment merge(const std::vector<Alignment>& partials);

enum class CellClass { Simple, Complex };
CellClass classify_cell(const Correspondence& c);

}  // namespace omx::edoal

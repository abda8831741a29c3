#include "omx/edoal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "omx/xml.hpp"

namespace omx::edoal {

namespace {

const std::string rdf_ns = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
const std::string xsd_ns = "http://www.w3.org/2001/XMLSchema#";

const std::vector<std::string>& eos_markers() {
    static const std::vector<std::string> markers = {
        "<|endoftext|>", "<|eot_id|>", "<|im_end|>", "<|end|>", "</s>", "<eos>",
    };
    return markers;
}

bool is_mask(const std::string& v) { return v.starts_with("MASK_"); }

}  // namespace

bool Expression::is_atomic() const {
    return kind == ExprKind::ClassId || kind == ExprKind::PropertyId ||
           kind == ExprKind::RelationId || kind == ExprKind::InstanceId;
}

std::string relation_symbol(Relation r) {
    switch (r) {
        case Relation::Equivalence: return "=";
        case Relation::Subsumes: return ">";
        case Relation::SubsumedBy: return "<";
    }
    return "=";
}

std::string fix_kind_name(FixKind k) {
    switch (k) {
        case FixKind::MissingPrefix: return "MissingPrefix";
        case FixKind::MissingOntologyTag: return "MissingOntologyTag";
        case FixKind::UnprefixedEntity: return "UnprefixedEntity";
        case FixKind::InvalidLiteral: return "InvalidLiteral";
        case FixKind::EosToken: return "EosToken";
        case FixKind::Other: return "Other";
    }
    return "Other";
}

bool RepairReport::has(FixKind k) const {
    for (const auto& f : fixes)
        if (f.kind == k) return true;
    return false;
}

std::string canonical_text(const Expression& e) {
    auto join = [](const std::vector<Expression>& xs) {
        std::string out;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) out += ",";
            out += canonical_text(xs[i]);
        }
        return out;
    };
    switch (e.kind) {
        case ExprKind::ClassId: return "C<" + e.id.value + ">";
        case ExprKind::PropertyId: return "P<" + e.id.value + ">";
        case ExprKind::RelationId: return "R<" + e.id.value + ">";
        case ExprKind::InstanceId: return "I<" + e.id.value + ">";
        case ExprKind::And: return "and(" + join(e.children) + ")";
        case ExprKind::Or: return "or(" + join(e.children) + ")";
        case ExprKind::Not: return "not(" + join(e.children) + ")";
        case ExprKind::Compose: return "compose(" + join(e.children) + ")";
        case ExprKind::Inverse: return "inverse(" + join(e.children) + ")";
        case ExprKind::AttrDomainRestriction:
            return "adr(" + join(e.children) + ")";
        case ExprKind::AttrTypeRestriction:
            return "atr(" + join(e.children) + ",<" + e.id.value + ">)";
        case ExprKind::AttrValueRestriction:
            return "avr(" + join(e.children) + ",<" + e.comparator.value + ">," +
                   e.value + ")";
        case ExprKind::AttrOccurenceRestriction:
            return "aor(" + join(e.children) + ",<" + e.comparator.value + ">," +
                   std::to_string(e.cardinality) + ")";
    }
    return "?";
}

std::vector<Iri> atomic_iris(const Expression& e) {
    std::vector<Iri> out;
    if (e.is_atomic()) {
        out.push_back(e.id);
        return out;
    }
    for (const auto& c : e.children) {
        auto sub = atomic_iris(c);
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string format_measure(double m) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", m);
    return buf;
}

class Writer {
  public:
    std::string run(const Alignment& a) {
        out_ << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
        out_ << "<rdf:RDF xmlns=\"" << align_ns << "\"\n"
             << "         xmlns:rdf=\"" << rdf_ns << "\"\n"
             << "         xmlns:xsd=\"" << xsd_ns << "\"\n"
             << "         xmlns:align=\"" << align_ns << "\"\n"
             << "         xmlns:edoal=\"" << edoal_ns << "\">\n";
        out_ << "  <Alignment>\n";
        out_ << "    <xml>yes</xml>\n";
        out_ << "    <level>" << xml::escape_text(a.level) << "</level>\n";
        out_ << "    <type>**</type>\n";
        out_ << "    <onto1><Ontology rdf:about=\"" << xml::escape_attr(a.onto1.value)
             << "\"/></onto1>\n";
        out_ << "    <onto2><Ontology rdf:about=\"" << xml::escape_attr(a.onto2.value)
             << "\"/></onto2>\n";

        // Cells sorted by normalized key so output is canonical.
        std::vector<const Correspondence*> cells;
        for (const auto& c : a.cells) cells.push_back(&c);
        std::stable_sort(cells.begin(), cells.end(),
                         [](const Correspondence* x, const Correspondence* y) {
                             return cell_key(*x) < cell_key(*y);
                         });
        for (const auto* c : cells) cell(*c);
        out_ << "  </Alignment>\n";
        out_ << "</rdf:RDF>\n";
        return out_.str();
    }

  private:
    std::ostringstream out_;

    static std::string cell_key(const Correspondence& c) {
        auto n = normalize(c);
        return canonical_text(n.entity1) + "|" + canonical_text(n.entity2) + "|" +
               relation_symbol(n.relation);
    }

    void indent(int depth) {
        for (int i = 0; i < depth; ++i) out_ << "  ";
    }

    void cell(const Correspondence& c) {
        out_ << "    <map>\n      <Cell>\n        <entity1>\n";
        expr(c.entity1, 5);
        out_ << "        </entity1>\n        <entity2>\n";
        expr(c.entity2, 5);
        out_ << "        </entity2>\n";
        out_ << "        <relation>" << xml::escape_text(relation_symbol(c.relation))
             << "</relation>\n";
        out_ << "        <measure rdf:datatype=\"" << xsd_ns << "float\">"
             << format_measure(c.measure) << "</measure>\n";
        out_ << "      </Cell>\n    </map>\n";
    }

    static const char* container_name(ExprContext ctx) {
        switch (ctx) {
            case ExprContext::Class: return "edoal:Class";
            case ExprContext::Property: return "edoal:Property";
            case ExprContext::Relation: return "edoal:Relation";
            case ExprContext::Instance: return "edoal:Instance";
        }
        return "edoal:Class";
    }

    void id_element(const char* name, const Iri& iri, int depth) {
        indent(depth);
        out_ << "<" << name << " rdf:about=\"" << xml::escape_attr(iri.value) << "\"/>\n";
    }

    void constructor(const Expression& e, const char* op, bool collection, int depth) {
        const char* cont = container_name(e.ctx);
        indent(depth);
        out_ << "<" << cont << ">\n";
        indent(depth + 1);
        out_ << "<edoal:" << op;
        if (collection) out_ << " rdf:parseType=\"Collection\"";
        out_ << ">\n";
        for (const auto& c : e.children) expr(c, depth + 2);
        indent(depth + 1);
        out_ << "</edoal:" << op << ">\n";
        indent(depth);
        out_ << "</" << cont << ">\n";
    }

    void expr(const Expression& e, int depth) {
        switch (e.kind) {
            case ExprKind::ClassId: id_element("edoal:Class", e.id, depth); return;
            case ExprKind::PropertyId: id_element("edoal:Property", e.id, depth); return;
            case ExprKind::RelationId: id_element("edoal:Relation", e.id, depth); return;
            case ExprKind::InstanceId: id_element("edoal:Instance", e.id, depth); return;
            case ExprKind::And: constructor(e, "and", true, depth); return;
            case ExprKind::Or: constructor(e, "or", true, depth); return;
            case ExprKind::Not: constructor(e, "not", false, depth); return;
            case ExprKind::Compose: constructor(e, "compose", true, depth); return;
            case ExprKind::Inverse: constructor(e, "inverse", false, depth); return;
            case ExprKind::AttrDomainRestriction: {
                indent(depth);
                out_ << "<edoal:AttributeDomainRestriction>\n";
                on_attribute(e.children[0], depth + 1);
                indent(depth + 1);
                out_ << "<edoal:class>\n";
                expr(e.children[1], depth + 2);
                indent(depth + 1);
                out_ << "</edoal:class>\n";
                indent(depth);
                out_ << "</edoal:AttributeDomainRestriction>\n";
                return;
            }
            case ExprKind::AttrTypeRestriction: {
                indent(depth);
                out_ << "<edoal:AttributeTypeRestriction>\n";
                on_attribute(e.children[0], depth + 1);
                indent(depth + 1);
                out_ << "<edoal:datatype><edoal:Datatype rdf:about=\""
                     << xml::escape_attr(e.id.value) << "\"/></edoal:datatype>\n";
                indent(depth);
                out_ << "</edoal:AttributeTypeRestriction>\n";
                return;
            }
            case ExprKind::AttrValueRestriction: {
                indent(depth);
                out_ << "<edoal:AttributeValueRestriction>\n";
                on_attribute(e.children[0], depth + 1);
                comparator(e.comparator, depth + 1);
                indent(depth + 1);
                out_ << "<edoal:value>" << xml::escape_text(e.value) << "</edoal:value>\n";
                indent(depth);
                out_ << "</edoal:AttributeValueRestriction>\n";
                return;
            }
            case ExprKind::AttrOccurenceRestriction: {
                indent(depth);
                out_ << "<edoal:AttributeOccurenceRestriction>\n";
                on_attribute(e.children[0], depth + 1);
                comparator(e.comparator, depth + 1);
                indent(depth + 1);
                out_ << "<edoal:value rdf:datatype=\"" << xsd_ns << "integer\">"
                     << e.cardinality << "</edoal:value>\n";
                indent(depth);
                out_ << "</edoal:AttributeOccurenceRestriction>\n";
                return;
            }
        }
    }

    void on_attribute(const Expression& attr, int depth) {
        indent(depth);
        out_ << "<edoal:onAttribute>\n";
        expr(attr, depth + 1);
        indent(depth);
        out_ << "</edoal:onAttribute>\n";
    }

    void comparator(const Iri& cmp, int depth) {
        indent(depth);
        out_ << "<edoal:comparator rdf:resource=\"" << xml::escape_attr(cmp.value)
             << "\"/>\n";
    }
};

}  // namespace

std::string serialize_alignment(const Alignment& a) { return Writer{}.run(a); }

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct NsScope {
    std::map<std::string, std::string> ns;
};

NsScope enter_scope(const xml::Element& el, const NsScope& outer) {
    NsScope scope = outer;
    for (const auto& [k, v] : el.attributes) {
        if (k == "xmlns") scope.ns[""] = v;
        else if (k.starts_with("xmlns:")) scope.ns[k.substr(6)] = v;
    }
    return scope;
}

// Resolved (namespace, local) of an element name.
std::pair<std::string, std::string> resolve_name(const xml::Element& el,
                                                 const NsScope& scope) {
    auto prefix = el.prefix();
    auto it = scope.ns.find(prefix);
    if (it == scope.ns.end())
        throw AlignmentError("undeclared namespace prefix '" + prefix + "'");
    return {it->second, el.local()};
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

class Reader {
  public:
    Alignment run(const xml::Element& root) {
        NsScope scope;
        scope = enter_scope(root, scope);
        for (const auto& [prefix, ns] : scope.ns)
            if (!prefix.empty()) alignment_.prefixes[prefix] = ns;

        auto [ns, local] = resolve_name(root, scope);
        const xml::Element* align_el = nullptr;
        NsScope align_scope = scope;
        if (ns == rdf_ns && local == "RDF") {
            for (const auto& c : root.children) {
                auto child_scope = enter_scope(c, scope);
                auto [cns, clocal] = resolve_name(c, child_scope);
                if (cns == align_ns && clocal == "Alignment") {
                    align_el = &c;
                    align_scope = child_scope;
                    break;
                }
            }
            if (!align_el) throw AlignmentError("no Alignment element under rdf:RDF");
        } else if (ns == align_ns && local == "Alignment") {
            align_el = &root;
        } else {
            throw AlignmentError("unexpected root element <" + root.name + ">");
        }
        alignment_element(*align_el, align_scope);
        return std::move(alignment_);
    }

  private:
    Alignment alignment_;

    void alignment_element(const xml::Element& el, const NsScope& outer) {
        NsScope scope = enter_scope(el, outer);
        for (const auto& c : el.children) {
            auto child_scope = enter_scope(c, scope);
            auto [ns, local] = resolve_name(c, child_scope);
            if (ns != align_ns) continue;
            if (local == "level") {
                alignment_.level = trim(c.text);
            } else if (local == "onto1") {
                alignment_.onto1 = ontology_ref(c, child_scope);
            } else if (local == "onto2") {
                alignment_.onto2 = ontology_ref(c, child_scope);
            } else if (local == "map") {
                for (const auto& cell_el : c.children) {
                    auto cell_scope = enter_scope(cell_el, child_scope);
                    auto [cns, clocal] = resolve_name(cell_el, cell_scope);
                    if (cns == align_ns && clocal == "Cell")
                        alignment_.cells.push_back(cell(cell_el, cell_scope));
                }
            }
        }
    }

    Iri ontology_ref(const xml::Element& el, const NsScope& scope) {
        if (auto* res = el.attr("rdf:resource")) return Iri{*res};
        for (const auto& c : el.children) {
            auto child_scope = enter_scope(c, scope);
            auto [ns, local] = resolve_name(c, child_scope);
            if (ns == align_ns && local == "Ontology") {
                if (auto* about = c.attr("rdf:about")) return Iri{*about};
                return Iri{};
            }
        }
        return Iri{trim(el.text)};
    }

    Correspondence cell(const xml::Element& el, const NsScope& outer) {
        NsScope scope = enter_scope(el, outer);
        Correspondence c;
        bool have1 = false, have2 = false;
        for (const auto& child : el.children) {
            auto child_scope = enter_scope(child, scope);
            auto [ns, local] = resolve_name(child, child_scope);
            if (ns != align_ns) continue;
            if (local == "entity1") {
                c.entity1 = entity(child, child_scope);
                have1 = true;
            } else if (local == "entity2") {
                c.entity2 = entity(child, child_scope);
                have2 = true;
            } else if (local == "relation") {
                c.relation = relation(trim(child.text));
            } else if (local == "measure") {
                c.measure = measure(trim(child.text));
            }
        }
        if (!have1 || !have2) throw AlignmentError("Cell missing entity1 or entity2");
        return c;
    }

    static Relation relation(const std::string& sym) {
        if (sym == "=" || sym == "Equivalence" || sym == "equivalence")
            return Relation::Equivalence;
        if (sym == "<" || sym == "&lt;") return Relation::SubsumedBy;
        if (sym == ">" || sym == "&gt;") return Relation::Subsumes;
        throw AlignmentError("malformed relation symbol '" + sym + "'");
    }

    static double measure(const std::string& text) {
        try {
            std::size_t used = 0;
            double v = std::stod(text, &used);
            if (used != text.size()) return 1.0;
            return v;
        } catch (...) {
            return 1.0;  // tolerated here; validate() flags it
        }
    }

    Expression entity(const xml::Element& el, const NsScope& scope) {
        const xml::Element* inner = nullptr;
        NsScope inner_scope = scope;
        for (const auto& c : el.children) {
            inner = &c;
            inner_scope = enter_scope(c, scope);
            break;
        }
        if (!inner) {
            // Plain rdf:resource entity reference: treat as a ClassId.
            if (auto* res = el.attr("rdf:resource")) {
                Expression e;
                e.kind = ExprKind::ClassId;
                e.id = Iri{*res};
                return e;
            }
            throw AlignmentError("empty entity element");
        }
        return expression(*inner, inner_scope);
    }

    Expression expression(const xml::Element& el, const NsScope& scope) {
        auto [ns, local] = resolve_name(el, scope);
        if (ns != edoal_ns)
            throw AlignmentError("unknown expression element <" + el.name + ">");

        if (local == "Class" || local == "Property" || local == "Relation" ||
            local == "Instance") {
            ExprContext ctx = local == "Class"      ? ExprContext::Class
                              : local == "Property" ? ExprContext::Property
                              : local == "Relation" ? ExprContext::Relation
                                                    : ExprContext::Instance;
            if (auto* about = el.attr("rdf:about")) {
                Expression e;
                e.ctx = ctx;
                e.kind = local == "Class"      ? ExprKind::ClassId
                         : local == "Property" ? ExprKind::PropertyId
                         : local == "Relation" ? ExprKind::RelationId
                                               : ExprKind::InstanceId;
                e.id = Iri{*about};
                return e;
            }
            // Constructor container.
            for (const auto& c : el.children) {
                auto child_scope = enter_scope(c, scope);
                auto [cns, clocal] = resolve_name(c, child_scope);
                if (cns != edoal_ns) continue;
                Expression e;
                e.ctx = ctx;
                if (clocal == "and") e.kind = ExprKind::And;
                else if (clocal == "or") e.kind = ExprKind::Or;
                else if (clocal == "not") e.kind = ExprKind::Not;
                else if (clocal == "compose") e.kind = ExprKind::Compose;
                else if (clocal == "inverse") e.kind = ExprKind::Inverse;
                else
                    throw AlignmentError("unknown constructor <" + c.name + ">");
                for (const auto& operand : c.children) {
                    auto op_scope = enter_scope(operand, child_scope);
                    e.children.push_back(expression(operand, op_scope));
                }
                return e;
            }
            throw AlignmentError("entity <" + el.name +
                                 "> has neither rdf:about nor a constructor");
        }

        if (local == "AttributeDomainRestriction")
            return restriction(el, scope, ExprKind::AttrDomainRestriction);
        if (local == "AttributeTypeRestriction")
            return restriction(el, scope, ExprKind::AttrTypeRestriction);
        if (local == "AttributeValueRestriction")
            return restriction(el, scope, ExprKind::AttrValueRestriction);
        if (local == "AttributeOccurenceRestriction")
            return restriction(el, scope, ExprKind::AttrOccurenceRestriction);

        throw AlignmentError("unknown expression element <" + el.name + ">");
    }

    Expression restriction(const xml::Element& el, const NsScope& scope, ExprKind kind) {
        Expression e;
        e.kind = kind;
        e.ctx = ExprContext::Class;
        for (const auto& c : el.children) {
            auto child_scope = enter_scope(c, scope);
            auto [ns, local] = resolve_name(c, child_scope);
            if (ns != edoal_ns) continue;
            if (local == "onAttribute") {
                for (const auto& inner : c.children) {
                    auto inner_scope = enter_scope(inner, child_scope);
                    e.children.insert(e.children.begin(), expression(inner, inner_scope));
                }
            } else if (local == "class") {
                for (const auto& inner : c.children) {
                    auto inner_scope = enter_scope(inner, child_scope);
                    e.children.push_back(expression(inner, inner_scope));
                }
            } else if (local == "datatype") {
                if (auto* res = c.attr("rdf:resource")) {
                    e.id = Iri{*res};
                } else if (!c.children.empty()) {
                    if (auto* about = c.children.front().attr("rdf:about"))
                        e.id = Iri{*about};
                } else {
                    e.id = Iri{trim(c.text)};
                }
            } else if (local == "comparator") {
                if (auto* res = c.attr("rdf:resource")) e.comparator = Iri{*res};
                else e.comparator = Iri{trim(c.text)};
            } else if (local == "value") {
                if (kind == ExprKind::AttrOccurenceRestriction) {
                    try {
                        e.cardinality = std::stol(trim(c.text));
                    } catch (...) {
                        e.cardinality = 0;
                    }
                } else {
                    e.value = trim(c.text);
                }
            }
        }
        if (e.children.empty())
            throw AlignmentError("restriction without onAttribute");
        return e;
    }
};

}  // namespace

Alignment parse_alignment(const std::string& xml_text) {
    xml::Element root;
    try {
        root = xml::parse(xml_text);
    } catch (const xml::ParseError& e) {
        throw AlignmentError(std::string("malformed XML: ") + e.what());
    }
    return Reader{}.run(root);
}

// ---------------------------------------------------------------------------
// Normalization, merge, classification

Expression normalize(const Expression& e) {
    Expression out = e;
    for (auto& c : out.children) c = normalize(c);
    if (out.kind == ExprKind::And || out.kind == ExprKind::Or) {
        std::sort(out.children.begin(), out.children.end(),
                  [](const Expression& a, const Expression& b) {
                      return canonical_text(a) < canonical_text(b);
                  });
        out.children.erase(std::unique(out.children.begin(), out.children.end()),
                           out.children.end());
        if (out.children.size() == 1) return out.children.front();
    } else if (out.kind == ExprKind::Not || out.kind == ExprKind::Inverse) {
        if (out.children.size() == 1 && out.children.front().kind == out.kind &&
            out.children.front().children.size() == 1)
            return out.children.front().children.front();
    }
    return out;
}

Correspondence normalize(const Correspondence& c) {
    Correspondence out = c;
    out.entity1 = normalize(c.entity1);
    out.entity2 = normalize(c.entity2);
    return out;
}

Alignment merge(const std::vector<Alignment>& partials) {
    Alignment out;
    struct Entry {
        Correspondence cell;
        std::string key;
    };
    std::map<std::string, Correspondence> merged;
    for (const auto& a : partials) {
        if (!a.onto1.value.empty()) {
            if (!out.onto1.value.empty() && out.onto1 != a.onto1)
                throw AlignmentError("conflicting onto1 identities in merge");
            out.onto1 = a.onto1;
        }
        if (!a.onto2.value.empty()) {
            if (!out.onto2.value.empty() && out.onto2 != a.onto2)
                throw AlignmentError("conflicting onto2 identities in merge");
            out.onto2 = a.onto2;
        }
        for (const auto& [k, v] : a.prefixes) out.prefixes.emplace(k, v);
        for (const auto& c : a.cells) {
            auto n = normalize(c);
            std::string key = canonical_text(n.entity1) + "|" + canonical_text(n.entity2) +
                              "|" + relation_symbol(n.relation);
            auto [it, inserted] = merged.emplace(key, c);
            if (!inserted) it->second.measure = std::max(it->second.measure, c.measure);
        }
    }
    for (const auto& [key, c] : merged) out.cells.push_back(c);
    return out;
}

CellClass classify_cell(const Correspondence& c) {
    return c.entity1.is_atomic() && c.entity2.is_atomic() ? CellClass::Simple
                                                          : CellClass::Complex;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void collect_prefix_usage(const xml::Element& el, std::set<std::string>& declared,
                          std::set<std::string>& used) {
    for (const auto& [k, v] : el.attributes) {
        if (k == "xmlns") declared.insert("");
        else if (k.starts_with("xmlns:")) declared.insert(k.substr(6));
        else if (auto pos = k.find(':'); pos != std::string::npos)
            used.insert(k.substr(0, pos));
    }
    auto prefix = el.prefix();
    used.insert(prefix);  // "" means default namespace
    for (const auto& c : el.children) collect_prefix_usage(c, declared, used);
}

void walk_cells(const xml::Element& el, std::vector<Fix>& issues) {
    if (el.local() == "measure") {
        std::string text = trim(el.text);
        bool ok = false;
        try {
            std::size_t used = 0;
            double v = std::stod(text, &used);
            ok = used == text.size() && v >= 0.0 && v <= 1.0;
        } catch (...) {
            ok = false;
        }
        if (!ok)
            issues.push_back({FixKind::InvalidLiteral, "measure '" + text + "'"});
    }
    if (auto* about = el.attr("rdf:about"); about && el.prefix() == "edoal") {
        Iri iri{*about};
        if (!iri.is_absolute() && !is_mask(*about))
            issues.push_back({FixKind::UnprefixedEntity, *about});
    }
    for (const auto& c : el.children) walk_cells(c, issues);
}

void check_arities(const Expression& e, std::vector<Fix>& issues) {
    if ((e.kind == ExprKind::And || e.kind == ExprKind::Or ||
         e.kind == ExprKind::Compose) &&
        e.children.size() < 2)
        issues.push_back({FixKind::Other, "constructor with fewer than 2 operands"});
    if ((e.kind == ExprKind::Not || e.kind == ExprKind::Inverse) &&
        e.children.size() != 1)
        issues.push_back({FixKind::Other, "unary constructor arity"});
    if (e.kind == ExprKind::AttrOccurenceRestriction && e.cardinality < 0)
        issues.push_back({FixKind::Other, "negative cardinality"});
    for (const auto& c : e.children) check_arities(c, issues);
}

}  // namespace

std::vector<Fix> validate(const std::string& xml_text) {
    std::vector<Fix> issues;
    for (const auto& marker : eos_markers())
        if (xml_text.find(marker) != std::string::npos)
            issues.push_back({FixKind::EosToken, marker});
    if (!issues.empty()) return issues;

    xml::Element root;
    try {
        root = xml::parse(xml_text);
    } catch (const xml::ParseError& e) {
        bool has_cell = xml_text.find("<Cell") != std::string::npos;
        bool has_root = xml_text.find("<rdf:RDF") != std::string::npos ||
                        xml_text.find("<Alignment") != std::string::npos;
        if (has_cell && !has_root)
            issues.push_back({FixKind::MissingOntologyTag, "no Alignment root element"});
        else
            issues.push_back({FixKind::Other, e.what()});
        return issues;
    }

    std::set<std::string> declared, used;
    collect_prefix_usage(root, declared, used);
    for (const auto& p : used)
        if (!declared.count(p) && p != "xml")
            issues.push_back(
                {FixKind::MissingPrefix, p.empty() ? "(default)" : p + ":"});

    bool root_is_rdf = root.local() == "RDF";
    const xml::Element* align_el = nullptr;
    if (root.local() == "Alignment") {
        align_el = &root;
    } else if (root_is_rdf) {
        for (const auto& c : root.children)
            if (c.local() == "Alignment") {
                align_el = &c;
                break;
            }
    }
    if (!align_el) {
        issues.push_back({FixKind::MissingOntologyTag, "no Alignment element"});
    } else {
        if (!align_el->child("onto1") && !align_el->child("align:onto1"))
            issues.push_back({FixKind::MissingOntologyTag, "missing onto1"});
        if (!align_el->child("onto2") && !align_el->child("align:onto2"))
            issues.push_back({FixKind::MissingOntologyTag, "missing onto2"});
    }

    walk_cells(root, issues);

    if (issues.empty()) {
        try {
            Alignment a = parse_alignment(xml_text);
            for (const auto& c : a.cells) {
                check_arities(c.entity1, issues);
                check_arities(c.entity2, issues);
                if (c.measure < 0.0 || c.measure > 1.0)
                    issues.push_back({FixKind::InvalidLiteral, "measure out of range"});
            }
        } catch (const AlignmentError& e) {
            issues.push_back({FixKind::Other, e.what()});
        }
    }
    return issues;
}

// ---------------------------------------------------------------------------
// Repair

namespace {

std::string strip_markers(const std::string& text, std::vector<Fix>& fixes) {
    std::string out = text;
    for (const auto& marker : eos_markers()) {
        bool found = false;
        for (auto pos = out.find(marker); pos != std::string::npos;
             pos = out.find(marker, pos)) {
            out.erase(pos, marker.size());
            found = true;
        }
        if (found) fixes.push_back({FixKind::EosToken, marker});
    }
    return out;
}

std::string strip_code_fence(const std::string& text, std::vector<Fix>& fixes) {
    auto first = text.find("```");
    if (first == std::string::npos) return text;
    auto line_end = text.find('\n', first);
    if (line_end == std::string::npos) return text;
    auto close = text.find("```", line_end);
    if (close == std::string::npos) return text;
    fixes.push_back({FixKind::Other, "markdown code fence"});
    return text.substr(line_end + 1, close - line_end - 1);
}

std::string wrap_cells(const std::string& text, std::vector<Fix>& fixes) {
    bool has_root = text.find("<rdf:RDF") != std::string::npos ||
                    text.find("<Alignment") != std::string::npos;
    if (has_root || text.find("<Cell") == std::string::npos) return text;
    fixes.push_back({FixKind::MissingOntologyTag, "wrapped stray Cells in Alignment"});
    std::ostringstream out;
    out << "<rdf:RDF xmlns=\"" << align_ns << "\" xmlns:rdf=\"" << rdf_ns
        << "\" xmlns:xsd=\"" << xsd_ns << "\" xmlns:align=\"" << align_ns
        << "\" xmlns:edoal=\"" << edoal_ns << "\">\n<Alignment>\n"
        << "<xml>yes</xml><level>2EDOAL</level><type>**</type>\n"
        << "<onto1><Ontology rdf:about=\"\"/></onto1>\n"
        << "<onto2><Ontology rdf:about=\"\"/></onto2>\n";
    // Each stray Cell gets its own map entry.
    std::string body = text;
    if (body.find("<map>") == std::string::npos) {
        std::ostringstream wrapped;
        std::size_t pos = 0;
        while (true) {
            auto open = body.find("<Cell", pos);
            if (open == std::string::npos) break;
            auto end = body.find("</Cell>", open);
            if (end == std::string::npos) break;
            wrapped << "<map>" << body.substr(open, end + 7 - open) << "</map>\n";
            pos = end + 7;
        }
        out << wrapped.str();
    } else {
        out << body;
    }
    out << "</Alignment>\n</rdf:RDF>\n";
    return out.str();
}

std::string inject_prefixes(const std::string& text, std::vector<Fix>& fixes) {
    xml::Element root;
    try {
        root = xml::parse(text);
    } catch (...) {
        return text;
    }
    std::set<std::string> declared, used;
    collect_prefix_usage(root, declared, used);

    static const std::map<std::string, std::string> known = {
        {"", align_ns},      {"align", align_ns}, {"edoal", edoal_ns},
        {"rdf", rdf_ns},     {"xsd", xsd_ns},
        {"rdfs", "http://www.w3.org/2000/01/rdf-schema#"},
    };
    std::string decls;
    for (const auto& p : used) {
        if (declared.count(p) || p == "xml") continue;
        auto it = known.find(p);
        if (it == known.end()) continue;
        std::string attr = p.empty() ? "xmlns" : "xmlns:" + p;
        decls += " " + attr + "=\"" + it->second + "\"";
        fixes.push_back({FixKind::MissingPrefix, p.empty() ? "(default)" : p + ":"});
    }
    if (decls.empty()) return text;

    auto open = text.find("<" + root.name);
    if (open == std::string::npos) return text;
    auto insert_at = open + 1 + root.name.size();
    std::string out = text;
    out.insert(insert_at, decls);
    return out;
}

Iri qualify(const std::string& name, const Iri& base, int side) {
    std::string b = base.value;
    if (b.empty()) b = side == 1 ? "http://example.org/onto1" : "http://example.org/onto2";
    if (!b.ends_with("#") && !b.ends_with("/")) b += "#";
    return Iri{b + name};
}

bool fix_entities(Expression& e, const Iri& base, int side, std::vector<Fix>& fixes) {
    bool changed = false;
    if (e.is_atomic() || e.kind == ExprKind::AttrTypeRestriction) {
        if (!e.id.value.empty() && !e.id.is_absolute() && !is_mask(e.id.value)) {
            fixes.push_back({FixKind::UnprefixedEntity, e.id.value});
            e.id = qualify(e.id.value, base, side);
            changed = true;
        }
    }
    for (auto& c : e.children) changed |= fix_entities(c, base, side, fixes);
    return changed;
}

}  // namespace

RepairResult repair(const std::string& xml_text) {
    RepairResult result;
    if (validate(xml_text).empty()) {
        result.text = xml_text;
        result.report.valid_after = true;
        return result;
    }

    std::vector<Fix>& fixes = result.report.fixes;
    std::string cur = strip_markers(xml_text, fixes);
    cur = strip_code_fence(cur, fixes);
    cur = trim(cur);
    cur = wrap_cells(cur, fixes);
    cur = inject_prefixes(cur, fixes);

    Alignment parsed;
    try {
        parsed = parse_alignment(cur);
    } catch (const AlignmentError& e) {
        result.text = xml_text;
        result.report.valid_after = false;
        fixes.push_back({FixKind::Other, std::string("unrepairable: ") + e.what()});
        return result;
    }

    for (auto& c : parsed.cells) {
        fix_entities(c.entity1, parsed.onto1, 1, fixes);
        fix_entities(c.entity2, parsed.onto2, 2, fixes);
        if (c.measure < 0.0 || c.measure > 1.0 || std::isnan(c.measure)) {
            fixes.push_back({FixKind::InvalidLiteral, "clamped measure"});
            c.measure = std::clamp(c.measure, 0.0, 1.0);
            if (std::isnan(c.measure)) c.measure = 1.0;
        }
    }

    // Flag invalid-literal measures detected textually (parser defaults them).
    {
        auto issues = validate(cur);
        for (const auto& issue : issues)
            if (issue.kind == FixKind::InvalidLiteral &&
                !result.report.has(FixKind::InvalidLiteral))
                fixes.push_back(issue);
    }

    result.text = serialize_alignment(parsed);
    result.report.valid_after = validate(result.text).empty();
    if (!result.report.valid_after) result.text = xml_text;
    return result;
}

}  // namespace omx::edoal

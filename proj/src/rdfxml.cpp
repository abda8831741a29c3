#include "omx/rdfxml.hpp"

#include <map>

#include "omx/xml.hpp"

namespace omx {

namespace {

constexpr const char* kRdfNs = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";

struct Scope {
    std::map<std::string, std::string> ns;  // prefix -> namespace ("" = default)
    std::string base;
};

class RdfXmlReader {
  public:
    OntologyGraph run(const xml::Element& root) {
        Scope scope;
        scope.ns["xml"] = "http://www.w3.org/XML/1998/namespace";
        Scope root_scope = enter(root, scope);
        std::string root_name = expand(root.name, root_scope, true);
        if (root_name == std::string(kRdfNs) + "RDF") {
            for (const auto& c : root.children) node_element(c, root_scope);
        } else {
            node_element(root, scope);
        }
        return std::move(graph_);
    }

  private:
    OntologyGraph graph_;
    std::map<std::string, std::string> blank_ids_;
    std::size_t next_blank_ = 0;

    Scope enter(const xml::Element& el, const Scope& outer) {
        Scope scope = outer;
        for (const auto& [k, v] : el.attributes) {
            if (k == "xmlns") {
                scope.ns[""] = v;
            } else if (k.starts_with("xmlns:")) {
                scope.ns[k.substr(6)] = v;
                // Keep declared prefixes so Turtle re-emission stays compact.
                graph_.add_prefix(k.substr(6), Iri{v});
            } else if (k == "xml:base") {
                scope.base = v;
                graph_.set_base(Iri{v});
            }
        }
        return scope;
    }

    std::string expand(const std::string& qname, const Scope& scope, bool element) {
        auto pos = qname.find(':');
        std::string prefix = pos == std::string::npos ? "" : qname.substr(0, pos);
        std::string local = pos == std::string::npos ? qname : qname.substr(pos + 1);
        if (prefix.empty() && !element) return local;  // unqualified attribute
        auto it = scope.ns.find(prefix);
        if (it == scope.ns.end())
            throw RdfXmlError("undeclared XML namespace prefix '" + prefix + "'");
        return it->second + local;
    }

    std::string blank_for(const std::string& node_id) {
        auto it = blank_ids_.find(node_id);
        if (it != blank_ids_.end()) return it->second;
        std::string id = "b" + std::to_string(next_blank_++);
        blank_ids_[node_id] = id;
        return id;
    }

    Iri resolve(const std::string& ref, const Scope& scope) const {
        Iri iri{ref};
        if (iri.is_absolute() || scope.base.empty()) return iri;
        if (!ref.empty() && ref[0] == '#') return Iri{scope.base + ref};
        return Iri{scope.base + ref};
    }

    Subject node_element(const xml::Element& el, const Scope& outer) {
        Scope scope = enter(el, outer);
        std::string name = expand(el.name, scope, true);

        Subject subj;
        if (auto* about = el.attr("rdf:about")) {
            subj = Subject{resolve(*about, scope)};
        } else if (auto* id = el.attr("rdf:ID")) {
            subj = Subject{resolve("#" + *id, scope)};
        } else if (auto* node_id = el.attr("rdf:nodeID")) {
            subj = Subject{BlankNode{blank_for(*node_id)}};
        } else {
            subj = Subject{BlankNode{"b" + std::to_string(next_blank_++)}};
        }

        if (name != std::string(kRdfNs) + "Description")
            graph_.add(Triple{subj, vocab::rdf_type, RdfTerm{Iri{name}}});

        // Literal-valued property attributes.
        for (const auto& [k, v] : el.attributes) {
            if (k == "xmlns" || k.starts_with("xmlns:") || k.starts_with("xml:")) continue;
            std::string full = expand(k, scope, false);
            if (full.starts_with(kRdfNs)) continue;
            if (full.find(':') == std::string::npos) continue;
            graph_.add(Triple{subj, Iri{full}, RdfTerm{Literal{v, std::nullopt, ""}}});
        }

        for (const auto& prop : el.children) property_element(subj, prop, scope);
        return subj;
    }

    void property_element(const Subject& subj, const xml::Element& el, const Scope& outer) {
        Scope scope = enter(el, outer);
        Iri pred{expand(el.name, scope, true)};

        if (auto* res = el.attr("rdf:resource")) {
            graph_.add(Triple{subj, pred, RdfTerm{resolve(*res, scope)}});
            return;
        }
        if (auto* node_id = el.attr("rdf:nodeID")) {
            graph_.add(Triple{subj, pred, RdfTerm{BlankNode{blank_for(*node_id)}}});
            return;
        }
        if (auto* pt = el.attr("rdf:parseType")) {
            if (*pt == "Resource") {
                BlankNode b{"b" + std::to_string(next_blank_++)};
                graph_.add(Triple{subj, pred, RdfTerm{b}});
                for (const auto& inner : el.children)
                    property_element(Subject{b}, inner, scope);
                return;
            }
            throw RdfXmlError("unsupported rdf:parseType '" + *pt + "'");
        }
        if (!el.children.empty()) {
            if (el.children.size() != 1)
                throw RdfXmlError("property element <" + el.name +
                                  "> has multiple node children");
            Subject obj = node_element(el.children.front(), scope);
            graph_.add(Triple{subj, pred, to_term(obj)});
            return;
        }

        Literal lit{el.text, std::nullopt, ""};
        if (auto* dt = el.attr("rdf:datatype")) lit.datatype = Iri{*dt};
        if (auto* lang = el.attr("xml:lang")) lit.lang = *lang;
        graph_.add(Triple{subj, pred, RdfTerm{lit}});
    }
};

}  // namespace

OntologyGraph parse_rdfxml(const std::string& text) {
    xml::Element root;
    try {
        root = xml::parse(text);
    } catch (const xml::ParseError& e) {
        throw RdfXmlError(std::string("malformed XML: ") + e.what());
    }
    return RdfXmlReader{}.run(root);
}

}  // namespace omx

#include "omx/turtle.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace omx {

namespace {

class TurtleParser {
  public:
    explicit TurtleParser(const std::string& text) : s_(text) {}

    OntologyGraph run() {
        for (;;) {
            skip_ws();
            if (eof()) break;
            if (peek() == '@') {
                directive();
            } else {
                statement();
            }
        }
        return std::move(graph_);
    }

  private:
    const std::string& s_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
    OntologyGraph graph_;
    std::map<std::string, std::string> blank_ids_;  // doc label -> canonical
    std::size_t next_blank_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw TurtleError(msg, line_, col_);
    }

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }

    char advance() {
        char c = s_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_ws() {
        for (;;) {
            while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
            if (!eof() && peek() == '#') {
                while (!eof() && peek() != '\n') advance();
                continue;
            }
            return;
        }
    }

    void expect(char c) {
        if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
        advance();
    }

    bool consume(char c) {
        if (!eof() && peek() == c) {
            advance();
            return true;
        }
        return false;
    }

    std::string word() {
        std::string out;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                          peek() == '-'))
            out.push_back(advance());
        return out;
    }

    void directive() {
        advance();  // '@'
        std::string kw = word();
        skip_ws();
        if (kw == "prefix") {
            std::string name = pname_prefix();
            expect(':');
            skip_ws();
            Iri ns = iriref();
            graph_.add_prefix(name, ns);
            skip_ws();
            expect('.');
        } else if (kw == "base") {
            graph_.set_base(iriref());
            skip_ws();
            expect('.');
        } else {
            fail("unknown directive @" + kw);
        }
    }

    std::string pname_prefix() {
        std::string out;
        while (!eof() && peek() != ':' &&
               !std::isspace(static_cast<unsigned char>(peek())))
            out.push_back(advance());
        return out;
    }

    Iri iriref() {
        expect('<');
        std::string v;
        while (!eof() && peek() != '>') {
            if (peek() == '\\') {
                advance();
                char e = advance();
                if (e == 'u' || e == 'U') fail("IRI unicode escapes unsupported");
                v.push_back(e);
            } else {
                v.push_back(advance());
            }
        }
        expect('>');
        Iri iri{v};
        if (!iri.is_absolute() && graph_.base())
            iri = Iri{graph_.base()->value + v};
        return iri;
    }

    Iri resolve_pname(const std::string& prefix, const std::string& local) {
        auto it = graph_.prefixes().find(prefix);
        if (it == graph_.prefixes().end()) fail("undeclared prefix '" + prefix + ":'");
        return Iri{it->second.value + local};
    }

    std::string canonical_blank(const std::string& doc_label) {
        auto it = blank_ids_.find(doc_label);
        if (it != blank_ids_.end()) return it->second;
        std::string id = "b" + std::to_string(next_blank_++);
        blank_ids_[doc_label] = id;
        return id;
    }

    std::string fresh_blank() { return "b" + std::to_string(next_blank_++); }

    static bool local_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
               c == '.' || c == '%';
    }

    std::string pn_local() {
        std::string out;
        while (!eof() && local_char(peek())) out.push_back(advance());
        // A trailing '.' terminates the statement, not the name.
        while (!out.empty() && out.back() == '.') {
            out.pop_back();
            --pos_;
            --col_;
        }
        return out;
    }

    void statement() {
        Subject subj = subject();
        predicate_object_list(subj);
        skip_ws();
        expect('.');
    }

    Subject subject() {
        skip_ws();
        if (peek() == '<') return Subject{iriref()};
        if (peek() == '_') {
            advance();
            expect(':');
            return Subject{BlankNode{canonical_blank(pn_local())}};
        }
        if (peek() == '[') {
            advance();
            BlankNode b{fresh_blank()};
            skip_ws();
            if (!consume(']')) {
                predicate_object_list(Subject{b});
                skip_ws();
                expect(']');
            }
            return Subject{b};
        }
        std::string prefix = pname_prefix();
        expect(':');
        return Subject{resolve_pname(prefix, pn_local())};
    }

    void predicate_object_list(const Subject& subj) {
        for (;;) {
            skip_ws();
            Iri pred = predicate();
            for (;;) {
                skip_ws();
                RdfTerm obj = object();
                graph_.add(Triple{subj, pred, obj});
                skip_ws();
                if (!consume(',')) break;
            }
            skip_ws();
            if (!consume(';')) return;
            skip_ws();
            // Dangling ';' before '.' or ']' is allowed.
            if (eof() || peek() == '.' || peek() == ']') return;
        }
    }

    Iri predicate() {
        if (peek() == '<') return iriref();
        if (peek() == 'a') {
            // 'a' keyword only when followed by whitespace.
            if (pos_ + 1 < s_.size() &&
                std::isspace(static_cast<unsigned char>(s_[pos_ + 1]))) {
                advance();
                return vocab::rdf_type;
            }
        }
        std::string prefix = pname_prefix();
        expect(':');
        return resolve_pname(prefix, pn_local());
    }

    RdfTerm object() {
        if (peek() == '<') return RdfTerm{iriref()};
        if (peek() == '"' || peek() == '\'') return RdfTerm{literal()};
        if (peek() == '_') {
            advance();
            expect(':');
            return RdfTerm{BlankNode{canonical_blank(pn_local())}};
        }
        if (peek() == '[') {
            advance();
            BlankNode b{fresh_blank()};
            skip_ws();
            if (!consume(']')) {
                predicate_object_list(Subject{b});
                skip_ws();
                expect(']');
            }
            return RdfTerm{b};
        }
        if (peek() == '(') fail("RDF collections are not supported");
        if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '+' ||
            peek() == '-')
            return RdfTerm{numeric_literal()};
        // Prefixed name or boolean keyword.
        std::string prefix = pname_prefix();
        if (prefix == "true" || prefix == "false")
            if (eof() || peek() != ':')
                return RdfTerm{Literal{prefix, vocab::xsd_boolean, ""}};
        expect(':');
        return RdfTerm{resolve_pname(prefix, pn_local())};
    }

    Literal numeric_literal() {
        std::string v;
        bool is_decimal = false;
        if (peek() == '+' || peek() == '-') v.push_back(advance());
        while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) {
            if (peek() == '.') {
                // '.' followed by non-digit ends the statement.
                if (pos_ + 1 >= s_.size() ||
                    !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))
                    break;
                is_decimal = true;
            }
            v.push_back(advance());
        }
        if (v.empty() || v == "+" || v == "-") fail("malformed numeric literal");
        return Literal{v, is_decimal ? vocab::xsd_decimal : vocab::xsd_integer, ""};
    }

    Literal literal() {
        char quote = advance();
        bool long_form = false;
        if (!eof() && peek() == quote) {
            advance();
            if (!eof() && peek() == quote) {
                advance();
                long_form = true;
            } else {
                return finish_literal("");  // empty string
            }
        }
        std::string v;
        for (;;) {
            if (eof()) fail("unterminated string literal");
            if (long_form) {
                if (peek() == quote && s_.compare(pos_, 3, std::string(3, quote)) == 0) {
                    advance();
                    advance();
                    advance();
                    break;
                }
            } else if (peek() == quote) {
                advance();
                break;
            }
            if (peek() == '\\') {
                advance();
                char e = advance();
                switch (e) {
                    case 'n': v.push_back('\n'); break;
                    case 't': v.push_back('\t'); break;
                    case 'r': v.push_back('\r'); break;
                    case '"': v.push_back('"'); break;
                    case '\'': v.push_back('\''); break;
                    case '\\': v.push_back('\\'); break;
                    default: fail(std::string("unsupported escape \\") + e);
                }
            } else {
                v.push_back(advance());
            }
        }
        return finish_literal(v);
    }

    Literal finish_literal(std::string v) {
        Literal lit{std::move(v), std::nullopt, ""};
        if (!eof() && peek() == '@') {
            advance();
            lit.lang = word();
        } else if (!eof() && peek() == '^') {
            advance();
            expect('^');
            if (peek() == '<') {
                lit.datatype = iriref();
            } else {
                std::string prefix = pname_prefix();
                expect(':');
                lit.datatype = resolve_pname(prefix, pn_local());
            }
        }
        return lit;
    }
};

bool pname_safe_local(const std::string& local) {
    if (local.empty()) return false;
    for (char c : local)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-')
            return false;
    return true;
}

std::string escape_literal(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

class TurtleWriter {
  public:
    explicit TurtleWriter(const OntologyGraph& g) : g_(g) {}

    std::string run() {
        std::ostringstream out;
        for (const auto& [name, ns] : g_.prefixes())
            out << "@prefix " << name << ": <" << ns.value << "> .\n";
        if (!g_.prefixes().empty() && !g_.triples().empty()) out << "\n";

        relabel_blanks();
        std::vector<std::string> lines;
        lines.reserve(g_.size());
        for (const auto& t : g_.triples())
            lines.push_back(render(t.subject) + " " + render_iri(t.predicate) + " " +
                            render(t.object) + " .");
        std::sort(lines.begin(), lines.end());
        for (const auto& l : lines) out << l << "\n";
        return out.str();
    }

  private:
    const OntologyGraph& g_;
    std::map<std::string, std::string> blank_map_;

    std::string render_iri(const Iri& iri) const {
        for (const auto& [name, ns] : g_.prefixes()) {
            if (iri.value.size() > ns.value.size() &&
                iri.value.compare(0, ns.value.size(), ns.value) == 0) {
                std::string local = iri.value.substr(ns.value.size());
                if (pname_safe_local(local)) return name + ":" + local;
            }
        }
        return "<" + iri.value + ">";
    }

    std::string blank_label(const std::string& id) const {
        auto it = blank_map_.find(id);
        return "_:" + (it != blank_map_.end() ? it->second : id);
    }

    std::string render(const Subject& s) const {
        if (auto* i = std::get_if<Iri>(&s)) return render_iri(*i);
        return blank_label(std::get<BlankNode>(s).id);
    }

    std::string render(const RdfTerm& t) const {
        if (auto* i = std::get_if<Iri>(&t)) return render_iri(*i);
        if (auto* b = std::get_if<BlankNode>(&t)) return blank_label(b->id);
        const auto& lit = std::get<Literal>(t);
        std::string out = "\"" + escape_literal(lit.lexical) + "\"";
        if (!lit.lang.empty()) out += "@" + lit.lang;
        else if (lit.datatype) out += "^^" + render_iri(*lit.datatype);
        return out;
    }

    // Sort triples with blank ids masked, then assign b0, b1, ... by first
    // occurrence so output labels are independent of input labels.
    void relabel_blanks() {
        struct Entry {
            std::string masked;
            std::string tiebreak;
            const Triple* t;
        };
        std::vector<Entry> entries;
        for (const auto& t : g_.triples()) {
            std::string masked = masked_render(t);
            std::string tie = render(t.subject) + " " + render(t.object);
            entries.push_back({std::move(masked), std::move(tie), &t});
        }
        std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
            return std::tie(a.masked, a.tiebreak) < std::tie(b.masked, b.tiebreak);
        });
        std::size_t next = 0;
        for (const auto& e : entries) {
            if (auto* b = std::get_if<BlankNode>(&e.t->subject))
                if (!blank_map_.count(b->id)) blank_map_[b->id] = "b" + std::to_string(next++);
            if (auto* b = std::get_if<BlankNode>(&e.t->object))
                if (!blank_map_.count(b->id)) blank_map_[b->id] = "b" + std::to_string(next++);
        }
    }

    std::string masked_render(const Triple& t) const {
        auto subj = std::holds_alternative<BlankNode>(t.subject) ? std::string("_:*")
                                                                 : render(t.subject);
        std::string obj = std::holds_alternative<BlankNode>(t.object) ? std::string("_:*")
                                                                      : render(t.object);
        return subj + " " + render_iri(t.predicate) + " " + obj;
    }
};

}  // namespace

OntologyGraph parse_turtle(const std::string& text) { return TurtleParser(text).run(); }

std::string serialize_turtle(const OntologyGraph& graph) {
    return TurtleWriter(graph).run();
}

}  // namespace omx

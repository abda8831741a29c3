#pragma once
// Minimal non-validating XML DOM, enough for RDF/XML and Alignment documents.
// No DTD, no processing beyond skipping the prolog, no external entities.

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace omx::xml {

struct ParseError : std::runtime_error {
    std::size_t line;
    std::size_t column;
    ParseError(const std::string& msg, std::size_t l, std::size_t c)
        : std::runtime_error(msg + " at line " + std::to_string(l) + ", column " +
                             std::to_string(c)),
          line(l), column(c) {}
};

struct Element {
    std::string name;  // raw qualified name, e.g. "edoal:Class"
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<Element> children;
    std::string text;  // concatenated character data of this element

    const std::string* attr(const std::string& key) const;
    const Element* child(const std::string& qname) const;
    std::vector<const Element*> children_named(const std::string& qname) const;

    std::string prefix() const;
    std::string local() const;
};

Element parse(const std::string& text);

std::string escape_text(const std::string& s);
std::string escape_attr(const std::string& s);

}  // namespace omx::xml

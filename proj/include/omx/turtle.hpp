#pragma once
// Turtle ingestion and emission. Emission is canonical: prefixes sorted by
// name, triples sorted lexicographically, blank nodes relabeled to b0, b1, ...

#include <stdexcept>
#include <string>

#include "omx/rdf.hpp"

namespace omx {

struct TurtleError : std::runtime_error {
    std::size_t line;
    std::size_t column;
    TurtleError(const std::string& msg, std::size_t l, std::size_t c)
        : std::runtime_error(msg + " at line " + std::to_string(l) + ", column " +
                             std::to_string(c)),
          line(l), column(c) {}
};

OntologyGraph parse_turtle(const std::string& text);

std::string serialize_turtle(const OntologyGraph& graph);

}  // namespace omx

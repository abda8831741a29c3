#pragma once
// RDF/XML ingestion (OAEI ontologies ship in this serialization).

#include <stdexcept>
#include <string>

#include "omx/rdf.hpp"

namespace omx {

struct RdfXmlError : std::runtime_error {
    explicit RdfXmlError(const std::string& msg) : std::runtime_error(msg) {}
};

OntologyGraph parse_rdfxml(const std::string& text);

}  // namespace omx

#pragma once
// Seeded random derivation of masked EDOAL alignment templates from a
// built-in production-rule grammar.

#include <cstdint>
#include <string>
#include <vector>

#include "omx/edoal.hpp"

namespace omx::grammar {

enum class SymbolType { NonTerminal, Terminal, Mask };

struct Symbol {
    SymbolType type = SymbolType::Terminal;
    std::string name;  // nonterminal name or terminal tag
};

struct ProductionRule {
    std::string lhs;
    std::vector<Symbol> rhs;  // rhs[0] is the operation tag terminal
    double weight = 1.0;

    bool terminal_only() const;
    std::string tag() const { return rhs.empty() ? "" : rhs.front().name; }
};

struct AlignmentTemplate {
    edoal::Alignment skeleton;  // entity IRI positions hold MASK_i placeholders
    std::size_t slot_count = 0;
    std::uint64_t seed = 0;
    std::size_t max_depth = 0;
};

enum class Side { Entity1, Entity2 };

struct SlotPosition {
    std::size_t slot = 0;  // 1-based MASK index
    std::size_t cell = 0;
    Side side = Side::Entity1;
    std::vector<std::size_t> path;  // child indices, root to leaf
};

// Built-in rule set covering the implemented EDOAL expression variants.
std::vector<ProductionRule> load_grammar();

AlignmentTemplate derive_template(const std::vector<ProductionRule>& rules,
                                  std::uint64_t seed, std::size_t max_depth,
                                  std::size_t cells,
                                  std::vector<std::string>* fired = nullptr);

AlignmentTemplate derive_template(std::uint64_t seed, std::size_t max_depth,
                                  std::size_t cells);

std::vector<SlotPosition> slot_positions(const AlignmentTemplate& t);

// Replace MASK_i with iris[i-1]; iris must cover slot_count.
edoal::Alignment substitute(const AlignmentTemplate& t, const std::vector<Iri>& iris);

}  // namespace omx::grammar

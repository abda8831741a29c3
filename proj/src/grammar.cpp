#include "omx/grammar.hpp"

#include <random>
#include <stdexcept>

namespace omx::grammar {

using edoal::ExprContext;
using edoal::Expression;
using edoal::ExprKind;

bool ProductionRule::terminal_only() const {
    for (const auto& s : rhs)
        if (s.type == SymbolType::NonTerminal) return false;
    return true;
}

namespace {

Symbol nt(std::string name) { return {SymbolType::NonTerminal, std::move(name)}; }
Symbol term(std::string name) { return {SymbolType::Terminal, std::move(name)}; }
Symbol mask() { return {SymbolType::Mask, "MASK"}; }

}  // namespace

std::vector<ProductionRule> load_grammar() {
    std::vector<ProductionRule> rules;
    auto add = [&](std::string lhs, std::vector<Symbol> rhs) {
        rules.push_back({std::move(lhs), std::move(rhs), 1.0});
    };

    add("Cell", {term("class-cell"), nt("ClassExpr"), nt("ClassExpr")});
    add("Cell", {term("property-cell"), nt("PropExpr"), nt("PropExpr")});
    add("Cell", {term("relation-cell"), nt("RelExpr"), nt("RelExpr")});

    add("ClassExpr", {term("class-id"), mask()});
    add("ClassExpr", {term("and"), nt("ClassExpr"), nt("ClassExpr")});
    add("ClassExpr", {term("or"), nt("ClassExpr"), nt("ClassExpr")});
    add("ClassExpr", {term("not"), nt("ClassExpr")});
    add("ClassExpr", {term("attr-domain"), nt("RelExpr"), nt("ClassExpr")});
    add("ClassExpr", {term("attr-type"), nt("PropExpr")});
    add("ClassExpr", {term("attr-value"), nt("PropExpr")});
    add("ClassExpr", {term("attr-occurence"), nt("RelExpr")});

    add("PropExpr", {term("property-id"), mask()});
    add("PropExpr", {term("and"), nt("PropExpr"), nt("PropExpr")});
    add("PropExpr", {term("or"), nt("PropExpr"), nt("PropExpr")});
    add("PropExpr", {term("compose"), nt("RelExpr"), nt("PropExpr")});

    add("RelExpr", {term("relation-id"), mask()});
    add("RelExpr", {term("and"), nt("RelExpr"), nt("RelExpr")});
    add("RelExpr", {term("or"), nt("RelExpr"), nt("RelExpr")});
    add("RelExpr", {term("compose"), nt("RelExpr"), nt("RelExpr")});
    add("RelExpr", {term("inverse"), nt("RelExpr")});

    return rules;
}

namespace {

const std::vector<Iri>& comparators() {
    static const std::vector<Iri> cs = {
        Iri{edoal::edoal_ns + "equals"},
        Iri{edoal::edoal_ns + "greater-than"},
        Iri{edoal::edoal_ns + "lower-than"},
    };
    return cs;
}

const std::vector<Iri>& datatypes() {
    static const std::vector<Iri> ds = {
        Iri{"http://www.w3.org/2001/XMLSchema#string"},
        Iri{"http://www.w3.org/2001/XMLSchema#integer"},
        Iri{"http://www.w3.org/2001/XMLSchema#date"},
    };
    return ds;
}

class Deriver {
  public:
    Deriver(const std::vector<ProductionRule>& rules, std::uint64_t seed,
            std::size_t max_depth, std::vector<std::string>* fired)
        : rules_(rules), rng_(seed), max_depth_(max_depth), fired_(fired) {}

    edoal::Correspondence cell() {
        const auto& rule = pick("Cell", 0);
        edoal::Correspondence c;
        c.entity1 = expand(rule.rhs[1].name, 0);
        c.entity2 = expand(rule.rhs[2].name, 0);
        c.relation = pick_relation();
        c.measure = 1.0;
        return c;
    }

    std::size_t slots() const { return next_slot_ - 1; }

  private:
    const std::vector<ProductionRule>& rules_;
    std::mt19937_64 rng_;
    std::size_t max_depth_;
    std::vector<std::string>* fired_;
    std::size_t next_slot_ = 1;

    // Deterministic uniform pick over cumulative weights; avoids the
    // implementation-defined std::discrete_distribution.
    const ProductionRule& pick(const std::string& lhs, std::size_t depth) {
        std::vector<const ProductionRule*> eligible;
        double total = 0.0;
        // The start symbol is exempt from terminal-forcing: its children are
        // expanded at depth 0 and capped there.
        bool capped = depth >= max_depth_ && lhs != "Cell";
        for (const auto& r : rules_) {
            if (r.lhs != lhs) continue;
            if (capped && !r.terminal_only()) continue;
            eligible.push_back(&r);
            total += r.weight;
        }
        if (eligible.empty())
            throw std::logic_error("no eligible rule for " + lhs);
        double roll = uniform() * total;
        double acc = 0.0;
        for (const auto* r : eligible) {
            acc += r->weight;
            if (roll < acc) {
                if (fired_) fired_->push_back(r->lhs + "/" + r->tag());
                return *r;
            }
        }
        if (fired_) fired_->push_back(eligible.back()->lhs + "/" + eligible.back()->tag());
        return *eligible.back();
    }

    double uniform() { return (rng_() >> 11) * 0x1.0p-53; }

    std::uint64_t pick_index(std::size_t n) { return rng_() % n; }

    edoal::Relation pick_relation() {
        switch (pick_index(3)) {
            case 0: return edoal::Relation::Equivalence;
            case 1: return edoal::Relation::Subsumes;
            default: return edoal::Relation::SubsumedBy;
        }
    }

    Iri fresh_mask() { return Iri{"MASK_" + std::to_string(next_slot_++)}; }

    Expression expand(const std::string& lhs, std::size_t depth) {
        const auto& rule = pick(lhs, depth);
        const std::string& tag = rule.tag();
        Expression e;

        auto ctx_of = [&](const std::string& category) {
            if (category == "ClassExpr") return ExprContext::Class;
            if (category == "PropExpr") return ExprContext::Property;
            return ExprContext::Relation;
        };
        e.ctx = ctx_of(lhs);

        if (tag == "class-id" || tag == "property-id" || tag == "relation-id") {
            e.kind = tag == "class-id"      ? ExprKind::ClassId
                     : tag == "property-id" ? ExprKind::PropertyId
                                            : ExprKind::RelationId;
            e.id = fresh_mask();
            return e;
        }
        if (tag == "and" || tag == "or" || tag == "compose") {
            e.kind = tag == "and"  ? ExprKind::And
                     : tag == "or" ? ExprKind::Or
                                   : ExprKind::Compose;
            for (std::size_t i = 1; i < rule.rhs.size(); ++i)
                e.children.push_back(expand(rule.rhs[i].name, depth + 1));
            return e;
        }
        if (tag == "not" || tag == "inverse") {
            e.kind = tag == "not" ? ExprKind::Not : ExprKind::Inverse;
            e.children.push_back(expand(rule.rhs[1].name, depth + 1));
            return e;
        }
        if (tag == "attr-domain") {
            e.kind = ExprKind::AttrDomainRestriction;
            e.children.push_back(expand("RelExpr", depth + 1));
            e.children.push_back(expand("ClassExpr", depth + 1));
            return e;
        }
        if (tag == "attr-type") {
            e.kind = ExprKind::AttrTypeRestriction;
            e.children.push_back(expand("PropExpr", depth + 1));
            e.id = datatypes()[pick_index(datatypes().size())];
            return e;
        }
        if (tag == "attr-value") {
            e.kind = ExprKind::AttrValueRestriction;
            e.children.push_back(expand("PropExpr", depth + 1));
            e.comparator = comparators()[pick_index(comparators().size())];
            e.value = "v" + std::to_string(pick_index(100));
            return e;
        }
        if (tag == "attr-occurence") {
            e.kind = ExprKind::AttrOccurenceRestriction;
            e.children.push_back(expand("RelExpr", depth + 1));
            e.comparator = comparators()[pick_index(comparators().size())];
            e.cardinality = static_cast<long>(pick_index(4));
            return e;
        }
        throw std::logic_error("unknown rule tag " + tag);
    }
};

}  // namespace

AlignmentTemplate derive_template(const std::vector<ProductionRule>& rules,
                                  std::uint64_t seed, std::size_t max_depth,
                                  std::size_t cells,
                                  std::vector<std::string>* fired) {
    if (cells == 0) throw std::invalid_argument("cells must be >= 1");
    AlignmentTemplate t;
    t.seed = seed;
    t.max_depth = max_depth;
    Deriver d(rules, seed, max_depth, fired);
    for (std::size_t i = 0; i < cells; ++i) t.skeleton.cells.push_back(d.cell());
    t.slot_count = d.slots();
    return t;
}

AlignmentTemplate derive_template(std::uint64_t seed, std::size_t max_depth,
                                  std::size_t cells) {
    static const auto rules = load_grammar();
    return derive_template(rules, seed, max_depth, cells, nullptr);
}

namespace {

std::size_t mask_slot(const Iri& iri) {
    if (!iri.value.starts_with("MASK_")) return 0;
    return std::stoul(iri.value.substr(5));
}

void collect_slots(const Expression& e, std::size_t cell, Side side,
                   std::vector<std::size_t>& path, std::vector<SlotPosition>& out) {
    if (e.is_atomic()) {
        if (auto slot = mask_slot(e.id))
            out.push_back({slot, cell, side, path});
        return;
    }
    for (std::size_t i = 0; i < e.children.size(); ++i) {
        path.push_back(i);
        collect_slots(e.children[i], cell, side, path, out);
        path.pop_back();
    }
}

void substitute_expr(Expression& e, const std::vector<Iri>& iris) {
    if (e.is_atomic()) {
        if (auto slot = mask_slot(e.id)) {
            if (slot > iris.size())
                throw std::invalid_argument("not enough IRIs for template slots");
            e.id = iris[slot - 1];
        }
        return;
    }
    for (auto& c : e.children) substitute_expr(c, iris);
}

}  // namespace

std::vector<SlotPosition> slot_positions(const AlignmentTemplate& t) {
    std::vector<SlotPosition> out;
    std::vector<std::size_t> path;
    for (std::size_t i = 0; i < t.skeleton.cells.size(); ++i) {
        collect_slots(t.skeleton.cells[i].entity1, i, Side::Entity1, path, out);
        collect_slots(t.skeleton.cells[i].entity2, i, Side::Entity2, path, out);
    }
    return out;
}

edoal::Alignment substitute(const AlignmentTemplate& t, const std::vector<Iri>& iris) {
    edoal::Alignment a = t.skeleton;
    for (auto& c : a.cells) {
        substitute_expr(c.entity1, iris);
        substitute_expr(c.entity2, iris);
    }
    return a;
}

}  // namespace omx::grammar

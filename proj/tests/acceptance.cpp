// Acceptance suite: one pass/fail line per criterion, non-zero exit on failure.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "json.hpp"
#include "omx/evaluation.hpp"
#include "omx/grammar.hpp"
#include "omx/pipeline.hpp"
#include "omx/synthesis.hpp"
#include "omx/turtle.hpp"

namespace fs = std::filesystem;
using namespace omx;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, const std::string& what, bool ok,
            const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << criterion << ": " << what;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

edoal::Alignment substituted(std::uint64_t seed, std::size_t cells) {
    auto t = grammar::derive_template(seed, 3, cells);
    std::vector<Iri> iris;
    for (std::size_t i = 1; i <= t.slot_count; ++i)
        iris.emplace_back("http://one.example/s" + std::to_string(seed) + "e" +
                          std::to_string(i));
    return grammar::substitute(t, iris);
}

// --------------------------------------------------------------------------
// 1. Repair reliability over a fault-injection corpus

std::string corrupt(const std::string& valid, int error_class) {
    switch (error_class) {
        case 0: {  // missing prefix declaration
            auto broken = valid;
            std::string decl = " xmlns:edoal=\"http://ns.inria.org/edoal/1.0/\"";
            auto pos = broken.find(decl);
            if (pos != std::string::npos) broken.erase(pos, decl.size());
            return broken;
        }
        case 1: {  // missing alignment/ontology wrapper: keep only the cells
            auto first = valid.find("<map>");
            auto last = valid.rfind("</map>");
            if (first == std::string::npos || last == std::string::npos) return valid;
            return valid.substr(first, last + 6 - first);
        }
        case 2: {  // unprefixed entity
            auto broken = valid;
            auto pos = broken.find("rdf:about=\"http://one.example/");
            if (pos == std::string::npos) return broken;
            auto start = pos + std::string("rdf:about=\"").size();
            auto end = broken.find('"', start);
            Iri iri{broken.substr(start, end - start)};
            broken.replace(start, end - start, iri.local_name());
            return broken;
        }
        case 3: {  // invalid measure literal
            auto broken = valid;
            auto pos = broken.find(">1</measure>");
            if (pos != std::string::npos) broken.replace(pos, 3, ">certainly<");
            return broken;
        }
        default:  // trailing EOS token
            return valid + "\n<|endoftext|>";
    }
}

void criterion_repair_reliability() {
    auto start = Clock::now();
    const std::size_t n = 500;
    std::size_t restored = 0;
    std::vector<std::string> repaired_texts;
    for (std::size_t i = 0; i < n; ++i) {
        auto valid = edoal::serialize_alignment(substituted(i, 1 + i % 3));
        auto broken = corrupt(valid, static_cast<int>(i % 5));
        auto r = edoal::repair(broken);
        if (r.report.valid_after) {
            ++restored;
            repaired_texts.push_back(r.text);
        }
    }
    double rate = static_cast<double>(restored) / n;
    double elapsed = seconds_since(start);
    report(1, "repair restores validity on >= 95% of 500 fault-injected alignments",
           rate >= 0.95 && elapsed < 30.0,
           "rate " + std::to_string(rate) + ", " + std::to_string(elapsed) + "s");

    bool idempotent = true;
    for (const auto& text : repaired_texts) {
        auto again = edoal::repair(text);
        if (again.text != text || !again.report.fixes.empty()) idempotent = false;
    }
    report(8, "repair is idempotent on all repaired outputs", idempotent);
}

// --------------------------------------------------------------------------
// 2. Corpus composition

void criterion_corpus_composition() {
    bool ok = true;
    std::string detail;
    auto full = synthesis::default_split(6650);
    if (full.first != 4650 || full.second != 2000) ok = false;
    for (std::size_t total : {66UL, 133UL, 665UL, 1330UL, 6650UL}) {
        auto [pos, neg] = synthesis::default_split(total);
        double expected = static_cast<double>(total) * 4650.0 / 6650.0;
        if (pos + neg != total || std::abs(static_cast<double>(pos) - expected) > 1.0) {
            ok = false;
            detail = "total " + std::to_string(total);
        }
    }
    report(2, "default corpus split mirrors 4650:2000 within +/-1 when scaled", ok,
           detail);
}

// --------------------------------------------------------------------------
// 3. Grammar soundness

void criterion_grammar_soundness() {
    auto start = Clock::now();
    auto rules = grammar::load_grammar();
    std::set<std::string> unfired;
    for (const auto& r : rules) unfired.insert(r.lhs + "/" + r.tag());

    bool all_valid = true, reproducible = true;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        std::vector<std::string> fired;
        auto t = grammar::derive_template(rules, seed, 3, 1 + seed % 5, &fired);
        for (const auto& f : fired) unfired.erase(f);

        auto t2 = grammar::derive_template(rules, seed, 3, 1 + seed % 5, nullptr);
        if (!(t.skeleton == t2.skeleton)) reproducible = false;

        std::vector<Iri> iris;
        for (std::size_t i = 1; i <= t.slot_count; ++i)
            iris.emplace_back("http://x.example/e" + std::to_string(i));
        auto text = edoal::serialize_alignment(grammar::substitute(t, iris));
        if (!edoal::validate(text).empty()) all_valid = false;
    }
    double elapsed = seconds_since(start);
    report(3,
           "1000 seeded templates validate, all rules fire, derivation reproducible",
           all_valid && reproducible && unfired.empty() && elapsed < 60.0,
           std::to_string(unfired.size()) + " unfired, " + std::to_string(elapsed) +
               "s");
}

// --------------------------------------------------------------------------
// 4. PageRank oracle equivalence

std::vector<double> dense_pagerank(const std::vector<std::vector<bool>>& adj,
                                   double damping, double eps, std::size_t max_iter) {
    std::size_t n = adj.size();
    std::vector<double> rank(n, 1.0 / n);
    std::vector<std::size_t> outdeg(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (adj[i][j]) ++outdeg[i];
    for (std::size_t it = 0; it < max_iter; ++it) {
        std::vector<double> next(n, 0.0);
        double dangling = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (outdeg[i] == 0) {
                dangling += rank[i];
                continue;
            }
            for (std::size_t j = 0; j < n; ++j)
                if (adj[i][j]) next[j] += rank[i] / outdeg[i];
        }
        double delta = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double v = (1.0 - damping) / n + damping * (next[j] + dangling / n);
            delta += std::abs(v - rank[j]);
            rank[j] = v;
        }
        if (delta < eps) break;
    }
    return rank;
}

void criterion_pagerank_oracle() {
    std::mt19937_64 rng(2024);
    bool ok = true;
    std::string detail;
    for (int trial = 0; trial < 50 && ok; ++trial) {
        std::size_t n = 1 + rng() % 20;
        std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
        EntityDigraph d;
        for (std::size_t i = 0; i < n; ++i) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "http://g%d/n%02zu", trial, i);
            d.nodes.emplace_back(buf);
        }
        d.out.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && rng() % 3 == 0) {
                    adj[i][j] = true;
                    d.out[i].push_back(j);
                }
        auto scores = pagerank(d, 0.85, 1e-12, 2000);
        auto oracle = dense_pagerank(adj, 0.85, 1e-14, 5000);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(scores[i].score - oracle[i]) >= 1e-8) {
                ok = false;
                detail = "trial " + std::to_string(trial);
            }
            sum += scores[i].score;
        }
        if (std::abs(sum - 1.0) > 1e-6) {
            ok = false;
            detail = "sum " + std::to_string(sum);
        }
    }
    report(4, "pagerank matches a dense oracle on 50 random digraphs", ok, detail);
}

// --------------------------------------------------------------------------
// 5. Module-extraction rules

void criterion_module_rules() {
    OntologyGraph g;
    auto cls = [&](const std::string& s) {
        g.add(Triple{Subject{Iri{s}}, vocab::rdf_type, RdfTerm{vocab::owl_class}});
    };
    cls("http://d/Anchor");
    cls("http://d/Neighbor");
    g.add(Triple{Subject{Iri{"http://d/Anchor"}}, Iri{"http://d/p"},
                 RdfTerm{Iri{"http://d/Neighbor"}}});
    g.add(Triple{Subject{Iri{"http://d/Anchor"}}, Iri{"http://d/q"},
                 RdfTerm{Iri{"http://www.w3.org/2002/07/owl#Thing"}}});
    g.add(Triple{Subject{Iri{"http://d/Anchor"}}, Iri{"http://d/q"},
                 RdfTerm{Iri{"http://ns.inria.org/edoal/1.0/#something"}}});
    g.add(Triple{Subject{Iri{"http://d/Anchor"}}, Iri{"http://d/r"},
                 RdfTerm{BlankNode{"b0"}}});
    std::string prev = "http://d/Anchor";
    for (int i = 1; i <= 8; ++i) {
        std::string super = "http://d/Super" + std::to_string(i);
        cls(super);
        g.add(Triple{Subject{Iri{prev}}, vocab::rdfs_subclassof, RdfTerm{Iri{super}}});
        prev = super;
    }

    std::vector<Iri> anchors = {Iri{"http://d/Anchor"}, Iri{"http://d/Neighbor"}};
    auto m = extract_module(g, anchors, 1, 5);

    bool no_blank = true;
    for (const auto& t : m.graph.triples())
        if (std::holds_alternative<BlankNode>(t.object)) no_blank = false;
    bool chain_ok = m.graph.mentions(Iri{"http://d/Super5"}) &&
                    !m.graph.mentions(Iri{"http://d/Super6"});
    bool vocab_ok = !m.graph.mentions(Iri{"http://www.w3.org/2002/07/owl#Thing"}) &&
                    !m.graph.mentions(Iri{"http://ns.inria.org/edoal/1.0/#something"});
    bool anchors_ok = true;
    for (const auto& a : anchors)
        if (!m.graph.mentions(a)) anchors_ok = false;

    report(5, "module extraction obeys blank-node, superclass, vocabulary, anchor rules",
           no_blank && chain_ok && vocab_ok && anchors_ok);
}

// --------------------------------------------------------------------------
// 6. End-to-end determinism under the mock backend

std::string match_response() {
    edoal::Alignment a;
    edoal::Correspondence c1;
    c1.entity1.kind = edoal::ExprKind::ClassId;
    c1.entity1.id = Iri{"http://src.example/Paper"};
    c1.entity2.kind = edoal::ExprKind::ClassId;
    c1.entity2.id = Iri{"http://tgt.example/Article"};
    edoal::Correspondence c2;
    c2.entity1.kind = edoal::ExprKind::ClassId;
    c2.entity1.id = Iri{"http://src.example/AcceptedPaper"};
    c2.entity2.kind = edoal::ExprKind::And;
    for (const char* iri : {"http://tgt.example/Article", "http://tgt.example/Acceptance"}) {
        edoal::Expression child;
        child.kind = edoal::ExprKind::ClassId;
        child.id = Iri{iri};
        c2.entity2.children.push_back(child);
    }
    a.cells = {c1, c2};
    return edoal::serialize_alignment(a);
}

void criterion_e2e_determinism() {
    fs::path fixture_dir = OMX_FIXTURE_DIR;
    auto dir = fs::temp_directory_path() / "omx_acceptance_e2e";
    fs::remove_all(dir);
    fs::create_directories(dir);

    auto src = fixture_dir / "toy_source.ttl";
    auto tgt = fixture_dir / "toy_target.ttl";

    RunConfig cfg;
    gateway::Gateway planner(cfg.gateway,
                             std::make_shared<gateway::MockBackend>(
                                 std::map<std::string, std::string>{}));
    auto plan = pipeline::plan_tasks(parse_turtle(slurp(src)), parse_turtle(slurp(tgt)),
                                     cfg, planner);
    nlohmann::json fixtures = nlohmann::json::object();
    for (const auto& t : plan.tasks)
        fixtures[gateway::prompt_hash_hex(t.prompt)] = match_response();
    spit(dir / "fixtures.json", fixtures.dump());

    std::vector<std::string> outputs;
    bool runs_ok = true;
    for (int i = 0; i < 3; ++i) {
        auto out = dir / ("run" + std::to_string(i));
        std::string cmd = std::string(OMX_CLI_PATH) + " match " + src.string() + " " +
                          tgt.string() + " --backend mock --fixtures " +
                          (dir / "fixtures.json").string() + " --out " + out.string() +
                          " > /dev/null 2>&1";
        if (WEXITSTATUS(std::system(cmd.c_str())) != 0) runs_ok = false;
        outputs.push_back(slurp(out / "final.edoal"));
    }
    bool identical = outputs[0] == outputs[1] && outputs[1] == outputs[2] &&
                     !outputs[0].empty();

    bool valid = false, no_dupes = true;
    try {
        auto final_a = edoal::parse_alignment(outputs[0]);
        valid = edoal::validate(outputs[0]).empty();
        std::set<std::string> keys;
        for (const auto& c : final_a.cells) {
            auto n = edoal::normalize(c);
            auto key = edoal::canonical_text(n.entity1) + "|" +
                       edoal::canonical_text(n.entity2) + "|" +
                       edoal::relation_symbol(n.relation);
            if (!keys.insert(key).second) no_dupes = false;
        }
    } catch (...) {
    }
    report(6, "match under the mock backend is byte-identical across 3 runs",
           runs_ok && identical && valid && no_dupes);
}

// --------------------------------------------------------------------------
// 7. Evaluation sanity

void criterion_evaluation_sanity() {
    bool self_ok = true;
    for (std::uint64_t seed : {10ULL, 20ULL, 30ULL}) {
        auto a = substituted(seed, 2 + seed % 3);
        auto r = evaluation::score(a, a);
        for (double v : {r.simple.precision, r.simple.recall, r.simple.f1,
                         r.complex.precision, r.complex.recall, r.complex.f1})
            if (std::abs(v - 1.0) > 1e-12) self_ok = false;
    }

    edoal::Correspondence complex_cell, atomic_cell;
    complex_cell.entity1.kind = edoal::ExprKind::ClassId;
    complex_cell.entity1.id = Iri{"http://a/AcceptedPaper"};
    complex_cell.entity2.kind = edoal::ExprKind::And;
    for (const char* iri : {"http://b/Paper", "http://b/Acceptance"}) {
        edoal::Expression child;
        child.kind = edoal::ExprKind::ClassId;
        child.id = Iri{iri};
        complex_cell.entity2.children.push_back(child);
    }
    atomic_cell.entity1 = complex_cell.entity1;
    atomic_cell.entity2.kind = edoal::ExprKind::ClassId;
    atomic_cell.entity2.id = Iri{"http://b/Paper"};
    bool example_ok =
        edoal::classify_cell(complex_cell) == edoal::CellClass::Complex &&
        std::abs(evaluation::cell_similarity(complex_cell, atomic_cell) - 0.75) < 1e-12;

    edoal::Alignment ref;
    ref.cells = {atomic_cell, complex_cell};
    auto zero = evaluation::score(edoal::Alignment{}, ref);
    bool empty_ok = zero.simple.precision == 0.0 && zero.simple.recall == 0.0 &&
                    zero.simple.f1 == 0.0 && zero.complex.f1 == 0.0;

    report(7, "self-score 1.0, empty-system 0, intersection example scores 0.75",
           self_ok && empty_ok && example_ok);
}

// --------------------------------------------------------------------------
// 8. Round-trip suite (alignments + Turtle; repair idempotence lives with 1)

void criterion_round_trips() {
    bool alignments_ok = true;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto a = substituted(seed, 1 + seed % 5);
        auto text = edoal::serialize_alignment(a);
        auto back = edoal::parse_alignment(text);
        if (edoal::serialize_alignment(back) != text) alignments_ok = false;
    }

    bool turtle_ok = true;
    std::mt19937_64 rng(9);
    for (int doc = 0; doc < 20; ++doc) {
        OntologyGraph g;
        g.add_prefix("ex", Iri{"http://ex" + std::to_string(doc) + ".example/"});
        std::size_t n = 3 + rng() % 8;
        for (std::size_t i = 0; i < n; ++i) {
            Iri s{"http://ex" + std::to_string(doc) + ".example/E" + std::to_string(i)};
            g.add(Triple{Subject{s}, vocab::rdf_type, RdfTerm{vocab::owl_class}});
            g.add(Triple{Subject{s}, vocab::rdfs_label,
                         RdfTerm{Literal{"entity " + std::to_string(i)}}});
            if (i > 0)
                g.add(Triple{Subject{s}, vocab::rdfs_subclassof,
                             RdfTerm{Iri{"http://ex" + std::to_string(doc) +
                                         ".example/E" + std::to_string(i - 1)}}});
            if (rng() % 2)
                g.add(Triple{Subject{s}, Iri{"http://ex.example/score"},
                             RdfTerm{Literal{std::to_string(i), vocab::xsd_integer, ""}}});
        }
        auto text = serialize_turtle(g);
        auto back = parse_turtle(text);
        if (back.triples() != g.triples() || serialize_turtle(back) != text)
            turtle_ok = false;
    }
    report(8, "parse/serialize identity for 100 alignments and 20 Turtle documents",
           alignments_ok && turtle_ok);
}

// --------------------------------------------------------------------------
// 9. Token budgeting

void criterion_token_budget() {
    fs::path fixture_dir = OMX_FIXTURE_DIR;
    RunConfig cfg;
    gateway::Gateway gw(cfg.gateway, std::make_shared<gateway::MockBackend>(
                                         std::map<std::string, std::string>{}));
    auto plan = pipeline::plan_tasks(parse_turtle(slurp(fixture_dir / "toy_source.ttl")),
                                     parse_turtle(slurp(fixture_dir / "toy_target.ttl")),
                                     cfg, gw);
    bool within = !plan.tasks.empty();
    for (const auto& t : plan.tasks)
        if (t.token_estimate > static_cast<std::size_t>(cfg.token_budget)) within = false;

    // Grow a synthetic pair until its one-shot prompt crosses 4000 tokens; it
    // must land in the same order of magnitude as the reported maximum.
    auto grow = [](const std::string& ns, std::size_t n) {
        OntologyGraph g;
        for (std::size_t i = 0; i < n; ++i) {
            Iri s{ns + "Entity" + std::to_string(i)};
            g.add(Triple{Subject{s}, vocab::rdf_type, RdfTerm{vocab::owl_class}});
            g.add(Triple{Subject{s}, vocab::rdfs_label,
                         RdfTerm{Literal{"descriptive label " + std::to_string(i)}}});
            g.add(Triple{Subject{s}, vocab::rdfs_comment,
                         RdfTerm{Literal{"a domain concept used for capacity sizing"}}});
        }
        return g;
    };
    std::size_t estimate = 0;
    for (std::size_t n = 20; n <= 400; n += 10) {
        OntologyModule src{grow("http://big-src.example/", n), {}, ModuleOrigin::Source};
        OntologyModule tgt{grow("http://big-tgt.example/", n), {}, ModuleOrigin::Target};
        auto prompt = pipeline::build_prompt(src, tgt, PromptStyle::Base);
        std::string all;
        for (const auto& m : prompt) all += m.content + "\n";
        estimate = estimate_tokens(all);
        if (estimate >= 4000) break;
    }
    bool order_ok = estimate >= 4000 && estimate <= 9000;
    report(9, "no planned task exceeds the 6500-token budget; synthetic pair in [4000,9000]",
           within && order_ok, "largest synthetic estimate " + std::to_string(estimate));
}

}  // namespace

int main() {
    criterion_repair_reliability();
    criterion_corpus_composition();
    criterion_grammar_soundness();
    criterion_pagerank_oracle();
    criterion_module_rules();
    criterion_e2e_determinism();
    criterion_evaluation_sanity();
    criterion_round_trips();
    criterion_token_budget();
    std::cout << (failures == 0 ? "all criteria passed"
                                : std::to_string(failures) + " criteria failed")
              << "\n";
    return failures == 0 ? 0 : 1;
}

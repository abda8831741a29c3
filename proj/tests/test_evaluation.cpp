#include "doctest.h"
#include "json.hpp"
#include "omx/evaluation.hpp"

using namespace omx;
using namespace omx::evaluation;

namespace {

edoal::Expression class_id(const std::string& iri) {
    edoal::Expression e;
    e.kind = edoal::ExprKind::ClassId;
    e.id = Iri{iri};
    return e;
}

edoal::Expression and_of(std::vector<edoal::Expression> children) {
    edoal::Expression e;
    e.kind = edoal::ExprKind::And;
    e.children = std::move(children);
    return e;
}

edoal::Correspondence cell_of(edoal::Expression e1, edoal::Expression e2,
                              edoal::Relation rel = edoal::Relation::Equivalence) {
    edoal::Correspondence c;
    c.entity1 = std::move(e1);
    c.entity2 = std::move(e2);
    c.relation = rel;
    return c;
}

edoal::Alignment alignment_of(std::vector<edoal::Correspondence> cells) {
    edoal::Alignment a;
    a.cells = std::move(cells);
    return a;
}

}  // namespace

TEST_CASE("f1 is the harmonic mean with f1(0,0)=0") {
    CHECK(f1(0.0, 0.0) == 0.0);
    CHECK(f1(1.0, 1.0) == doctest::Approx(1.0));
    CHECK(f1(0.5, 1.0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("cell similarity basics") {
    auto A = class_id("http://x/A");
    auto B = class_id("http://y/B");
    auto C = class_id("http://y/C");

    CHECK(cell_similarity(cell_of(A, B), cell_of(A, B)) == doctest::Approx(1.0));
    // relation mismatch gates to zero
    CHECK(cell_similarity(cell_of(A, B),
                          cell_of(A, B, edoal::Relation::Subsumes)) == 0.0);
    // A≡B vs A≡C: half credit from the shared left side
    CHECK(cell_similarity(cell_of(A, B), cell_of(A, C)) == doctest::Approx(0.5));
}

TEST_CASE("hand-evaluated jaccard oracle: atomic vs intersection") {
    // AcceptedPaper ≡ And(Paper, Acceptance) against AcceptedPaper ≡ Paper:
    // left sides identical (1), right sides overlap 1 of 2 → ½·1 + ½·½ = 0.75
    auto complex_cell = cell_of(class_id("http://a/AcceptedPaper"),
                                and_of({class_id("http://b/Paper"),
                                        class_id("http://b/Acceptance")}));
    auto atomic_cell =
        cell_of(class_id("http://a/AcceptedPaper"), class_id("http://b/Paper"));
    CHECK(edoal::classify_cell(complex_cell) == edoal::CellClass::Complex);
    CHECK(cell_similarity(complex_cell, atomic_cell) == doctest::Approx(0.75));
}

TEST_CASE("cell similarity is symmetric and normalization-equality forces 1") {
    auto a = cell_of(class_id("http://a/X"),
                     and_of({class_id("http://b/P"), class_id("http://b/Q")}));
    auto b = cell_of(class_id("http://a/X"),
                     and_of({class_id("http://b/Q"), class_id("http://b/P")}));
    CHECK(cell_similarity(a, b) == doctest::Approx(cell_similarity(b, a)));
    CHECK(cell_similarity(a, b) == doctest::Approx(1.0));  // equal after normalize
}

TEST_CASE("self-comparison scores 1.0 on non-empty partitions") {
    auto a = alignment_of({
        cell_of(class_id("http://a/X"), class_id("http://b/Y")),
        cell_of(class_id("http://a/Z"),
                and_of({class_id("http://b/P"), class_id("http://b/Q")})),
    });
    auto r = score(a, a);
    for (double v : {r.simple.precision, r.simple.recall, r.simple.f1,
                     r.complex.precision, r.complex.recall, r.complex.f1})
        CHECK(v == doctest::Approx(1.0));
    CHECK(r.counts.ref_simple == 1);
    CHECK(r.counts.ref_complex == 1);
}

TEST_CASE("empty system against a non-empty reference scores zero") {
    auto ref = alignment_of({
        cell_of(class_id("http://a/X"), class_id("http://b/Y")),
        cell_of(class_id("http://a/Z"), class_id("http://b/W")),
        cell_of(class_id("http://a/V"),
                and_of({class_id("http://b/P"), class_id("http://b/Q")})),
    });
    auto r = score(alignment_of({}), ref);
    CHECK(r.simple.precision == 0.0);
    CHECK(r.simple.recall == 0.0);
    CHECK(r.simple.f1 == 0.0);
    CHECK(r.complex.f1 == 0.0);
}

TEST_CASE("both partitions empty score 1.0") {
    auto r = score(alignment_of({}), alignment_of({}));
    CHECK(r.simple.f1 == doctest::Approx(1.0));
    CHECK(r.complex.f1 == doctest::Approx(1.0));
}

TEST_CASE("partition split: simple exact, missing complex scores zero") {
    auto simple_cell = cell_of(class_id("http://a/A"), class_id("http://b/B"));
    auto complex_cell = cell_of(class_id("http://a/C"),
                                and_of({class_id("http://b/D"), class_id("http://b/E")}));
    auto r = score(alignment_of({simple_cell}),
                   alignment_of({simple_cell, complex_cell}));
    CHECK(r.simple.precision == doctest::Approx(1.0));
    CHECK(r.simple.recall == doctest::Approx(1.0));
    CHECK(r.simple.f1 == doctest::Approx(1.0));
    CHECK(r.complex.precision == 0.0);  // no complex system cells
    CHECK(r.complex.recall == 0.0);
    CHECK(r.counts.sys_complex == 0);
    CHECK(r.counts.ref_complex == 1);
}

TEST_CASE("adding a matching cell never decreases recall") {
    auto c1 = cell_of(class_id("http://a/A"), class_id("http://b/B"));
    auto c2 = cell_of(class_id("http://a/C"), class_id("http://b/D"));
    auto ref = alignment_of({c1, c2});
    auto before = score(alignment_of({c1}), ref);
    auto after = score(alignment_of({c1, c2}), ref);
    CHECK(after.simple.recall >= before.simple.recall);
}

TEST_CASE("all reported values stay within [0,1]") {
    auto sys = alignment_of({
        cell_of(class_id("http://a/A"), class_id("http://b/WRONG")),
        cell_of(class_id("http://a/C"),
                and_of({class_id("http://b/D"), class_id("http://b/X")})),
    });
    auto ref = alignment_of({
        cell_of(class_id("http://a/A"), class_id("http://b/B")),
        cell_of(class_id("http://a/C"),
                and_of({class_id("http://b/D"), class_id("http://b/E")})),
    });
    auto r = score(sys, ref);
    for (double v : {r.simple.precision, r.simple.recall, r.simple.f1,
                     r.complex.precision, r.complex.recall, r.complex.f1}) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("report table shape and averages") {
    auto perfect = alignment_of({
        cell_of(class_id("http://a/A"), class_id("http://b/B")),
        cell_of(class_id("http://a/C"),
                and_of({class_id("http://b/D"), class_id("http://b/E")})),
    });
    std::map<std::string, EvalReport> reports;
    reports["conference"] = score(perfect, perfect);
    reports["geolink"] = score(alignment_of({}), perfect);

    auto table = report_table(reports);
    CHECK(table.find("s-p") != std::string::npos);
    CHECK(table.find("s-r") != std::string::npos);
    CHECK(table.find("s-f") != std::string::npos);
    CHECK(table.find("c-p") != std::string::npos);
    CHECK(table.find("c-r") != std::string::npos);
    CHECK(table.find("c-f") != std::string::npos);
    CHECK(table.find("conference") != std::string::npos);
    CHECK(table.find("average") != std::string::npos);
    // perfect row renders as 1.00s, average of {1.0, 0.0} as 0.50
    CHECK(table.find(" 1.00  1.00  1.00  1.00  1.00  1.00") != std::string::npos);
    CHECK(table.find(" 0.50  0.50  0.50  0.50  0.50  0.50") != std::string::npos);

    CHECK(report_table({}) ==
          "dataset                s-p   s-r   s-f   c-p   c-r   c-f\n");
}

TEST_CASE("json report round-trips the table values") {
    auto perfect = alignment_of({cell_of(class_id("http://a/A"), class_id("http://b/B"))});
    std::map<std::string, EvalReport> reports;
    reports["d1"] = score(perfect, perfect);
    auto parsed = nlohmann::json::parse(report_json(reports));
    CHECK(parsed.at("d1").at("simple").at("f1").get<double>() == doctest::Approx(1.0));
    CHECK(parsed.at("d1").at("counts").at("ref_simple").get<int>() == 1);

    // re-render a report map from the JSON and compare tables
    std::map<std::string, EvalReport> rebuilt;
    for (const auto& [name, r] : parsed.items()) {
        EvalReport er;
        er.simple = {r.at("simple").at("precision"), r.at("simple").at("recall"),
                     r.at("simple").at("f1")};
        er.complex = {r.at("complex").at("precision"), r.at("complex").at("recall"),
                      r.at("complex").at("f1")};
        rebuilt[name] = er;
    }
    CHECK(report_table(rebuilt) == report_table(reports));
}

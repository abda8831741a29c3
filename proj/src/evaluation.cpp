#include "omx/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "json.hpp"

namespace omx::evaluation {

double f1(double precision, double recall) {
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

namespace {

double jaccard(const std::vector<Iri>& xs, const std::vector<Iri>& ys) {
    std::set<Iri> a(xs.begin(), xs.end());
    std::set<Iri> b(ys.begin(), ys.end());
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& x : a) inter += b.count(x);
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

}  // namespace

double cell_similarity(const edoal::Correspondence& a,
                       const edoal::Correspondence& b) {
    if (a.relation != b.relation) return 0.0;
    auto na = edoal::normalize(a);
    auto nb = edoal::normalize(b);
    if (na == nb) return 1.0;
    return 0.5 * jaccard(edoal::atomic_iris(a.entity1), edoal::atomic_iris(b.entity1)) +
           0.5 * jaccard(edoal::atomic_iris(a.entity2), edoal::atomic_iris(b.entity2));
}

namespace {

using Cells = std::vector<edoal::Correspondence>;

double directed_sum(const Cells& from, const Cells& to) {
    double total = 0.0;
    for (const auto& c : from) {
        double best = 0.0;
        for (const auto& d : to) best = std::max(best, cell_similarity(c, d));
        total += best;
    }
    return total;
}

Prf partition_prf(const Cells& sys, const Cells& ref) {
    Prf out;
    if (sys.empty() && ref.empty()) {
        out.precision = out.recall = out.f1 = 1.0;
        return out;
    }
    out.precision = sys.empty() ? 0.0 : directed_sum(sys, ref) / sys.size();
    out.recall = ref.empty() ? 0.0 : directed_sum(ref, sys) / ref.size();
    out.f1 = f1(out.precision, out.recall);
    return out;
}

std::pair<Cells, Cells> partition(const edoal::Alignment& a) {
    Cells simple, complex;
    for (const auto& c : a.cells)
        (edoal::classify_cell(c) == edoal::CellClass::Simple ? simple : complex)
            .push_back(c);
    return {simple, complex};
}

}  // namespace

EvalReport score(const edoal::Alignment& system, const edoal::Alignment& reference) {
    auto [sys_simple, sys_complex] = partition(system);
    auto [ref_simple, ref_complex] = partition(reference);

    EvalReport report;
    report.counts = {ref_simple.size(), ref_complex.size(), sys_simple.size(),
                     sys_complex.size()};
    report.simple = partition_prf(sys_simple, ref_simple);
    report.complex = partition_prf(sys_complex, ref_complex);
    return report;
}

namespace {

std::string row(const std::string& name, const Prf& s, const Prf& c) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-20s %5.2f %5.2f %5.2f %5.2f %5.2f %5.2f\n",
                  name.c_str(), s.precision, s.recall, s.f1, c.precision, c.recall,
                  c.f1);
    return buf;
}

}  // namespace

std::string report_table(const std::map<std::string, EvalReport>& reports) {
    std::string out = "dataset                s-p   s-r   s-f   c-p   c-r   c-f\n";
    Prf avg_s, avg_c;
    for (const auto& [name, r] : reports) {
        out += row(name, r.simple, r.complex);
        avg_s.precision += r.simple.precision;
        avg_s.recall += r.simple.recall;
        avg_s.f1 += r.simple.f1;
        avg_c.precision += r.complex.precision;
        avg_c.recall += r.complex.recall;
        avg_c.f1 += r.complex.f1;
    }
    if (!reports.empty()) {
        double n = static_cast<double>(reports.size());
        for (double* v : {&avg_s.precision, &avg_s.recall, &avg_s.f1, &avg_c.precision,
                          &avg_c.recall, &avg_c.f1})
            *v /= n;
        out += row("average", avg_s, avg_c);
    }
    return out;
}

std::string report_json(const std::map<std::string, EvalReport>& reports) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [name, r] : reports) {
        out[name] = {
            {"simple",
             {{"precision", r.simple.precision},
              {"recall", r.simple.recall},
              {"f1", r.simple.f1}}},
            {"complex",
             {{"precision", r.complex.precision},
              {"recall", r.complex.recall},
              {"f1", r.complex.f1}}},
            {"counts",
             {{"ref_simple", r.counts.ref_simple},
              {"ref_complex", r.counts.ref_complex},
              {"sys_simple", r.counts.sys_simple},
              {"sys_complex", r.counts.sys_complex}}},
        };
    }
    return out.dump(2) + "\n";
}

}  // namespace omx::evaluation

#pragma once
// Relaxed precision/recall scoring of a system alignment against a reference,
// split into simple (1:1) and complex partitions.

#include <map>
#include <string>

#include "omx/edoal.hpp"

namespace omx::evaluation {

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvalCounts {
    std::size_t ref_simple = 0;
    std::size_t ref_complex = 0;
    std::size_t sys_simple = 0;
    std::size_t sys_complex = 0;
};

struct EvalReport {
    Prf simple;
    Prf complex;
    EvalCounts counts;
};

double f1(double precision, double recall);

// Relaxed similarity surrogate: 0 if relations differ, else the mean of the
// per-side Jaccard overlaps of atomic IRIs. Structural equality after
// normalization forces 1.0. This stands in for an external metric; absolute
// scores are only comparable within this harness.
double cell_similarity(const edoal::Correspondence& a,
                       const edoal::Correspondence& b);

EvalReport score(const edoal::Alignment& system, const edoal::Alignment& reference);

// Fixed-width text table with s-p s-r s-f c-p c-r c-f columns, two decimals,
// and a trailing average row.
std::string report_table(const std::map<std::string, EvalReport>& reports);

// Same content as JSON text (object dataset -> {simple:{...}, complex:{...}}).
std::string report_json(const std::map<std::string, EvalReport>& reports);

}  // namespace omx::evaluation

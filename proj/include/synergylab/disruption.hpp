#pragma once

#include "synergylab/citation_graph.hpp"

#include <cstdint>
#include <vector>

namespace synergylab {

// What happens to citers that cite the focal paper and between 1 and l-1
// of its references. Folding them into n_i keeps n_i + n_j independent of
// l; Discard drops them from the index entirely.
enum class SubThresholdPolicy : uint8_t { ReclassifyToI, Discard };

struct DiParams {
    int l = 5;
    int32_t window = 5; // years; -1 = unbounded
    SubThresholdPolicy policy = SubThresholdPolicy::ReclassifyToI;
};

struct CiterClassification {
    uint32_t n_i = 0; // cite the focal paper, fewer than l of its references
    uint32_t n_j = 0; // cite the focal paper and >= l of its references
    uint32_t n_k = 0; // cite >= 1 reference but not the focal paper
    int l = 0;
    int32_t window = 0;
};

struct DisruptionScore {
    PaperNode paper = 0;
    CiterClassification counts;
    double di = 0.0;
    bool defined = false; // false iff n_i + n_j + n_k == 0
};

struct DiDiagnostics {
    uint64_t citers_no_year = 0;
    uint64_t citers_before_focal = 0;
    uint64_t sub_threshold_discarded = 0;
};

CiterClassification classify_citers(const CitationGraph& graph, PaperNode fp,
                                    const DiParams& params);

DisruptionScore di_l(const CitationGraph& graph, PaperNode fp, const DiParams& params);

// Batch DI over focal papers. Results come back in the order of `papers`
// (callers pass interned-id-sorted lists); identical output regardless of
// thread count. The serial variant is the reference implementation the
// tests and the benchmark compare against.
std::vector<DisruptionScore> di_batch(const CitationGraph& graph,
                                      const std::vector<PaperNode>& papers,
                                      const DiParams& params,
                                      DiDiagnostics* diag = nullptr);

std::vector<DisruptionScore> di_batch_serial(const CitationGraph& graph,
                                             const std::vector<PaperNode>& papers,
                                             const DiParams& params,
                                             DiDiagnostics* diag = nullptr);

} // namespace synergylab

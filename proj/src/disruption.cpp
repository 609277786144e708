#include "synergylab/disruption.hpp"

#include "synergylab/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace synergylab {

namespace {

// Epoch-stamped scratch: clearing between focal papers is O(1). One
// instance per thread; sized to the full node range.
struct Scratch {
    std::vector<uint32_t> ref_stamp;   // node is a reference of the current fp
    std::vector<uint32_t> citer_stamp; // node is a windowed citer of the current fp
    std::vector<uint32_t> seen_stamp;  // node already considered as a k candidate
    uint32_t epoch = 0;

    explicit Scratch(uint32_t n_nodes)
        : ref_stamp(n_nodes, 0), citer_stamp(n_nodes, 0), seen_stamp(n_nodes, 0) {}
};

CiterClassification classify_one(const CitationGraph& g, PaperNode fp, const DiParams& params,
                                 Scratch& s, DiDiagnostics& diag) {
    const int32_t t = g.year_of(fp);
    if (t == kNoYear)
        throw DataError("disruption: focal paper " + std::to_string(fp) + " has no year");

    CiterClassification cl;
    cl.l = params.l;
    cl.window = params.window;

    const uint32_t e = ++s.epoch;
    auto refs = g.references(fp);
    for (PaperNode r : refs) s.ref_stamp[r] = e;

    for (PaperNode q : g.citers(fp)) {
        const int32_t y = g.year_of(q);
        if (y == kNoYear) { ++diag.citers_no_year; continue; }
        if (y < t) { ++diag.citers_before_focal; continue; }
        if (params.window >= 0 && y > t + params.window) continue;
        s.citer_stamp[q] = e;
        uint32_t shared = 0;
        for (PaperNode x : g.references(q))
            if (s.ref_stamp[x] == e) ++shared;
        if (shared >= static_cast<uint32_t>(params.l)) {
            ++cl.n_j;
        } else if (shared == 0 || params.policy == SubThresholdPolicy::ReclassifyToI) {
            ++cl.n_i;
        } else {
            ++diag.sub_threshold_discarded;
        }
    }

    for (PaperNode r : refs) {
        for (PaperNode q : g.citers(r)) {
            if (q == fp || s.seen_stamp[q] == e) continue;
            s.seen_stamp[q] = e;
            const int32_t y = g.year_of(q);
            if (y == kNoYear || y < t) continue;
            if (params.window >= 0 && y > t + params.window) continue;
            if (s.citer_stamp[q] == e) continue; // cites the fp itself
            ++cl.n_k;
        }
    }
    return cl;
}

bool g_has_year(const CitationGraph& g, PaperNode p) {
    return p < g.n_nodes() && g.has_year(p);
}

DisruptionScore score_from(PaperNode fp, const CiterClassification& cl) {
    DisruptionScore out;
    out.paper = fp;
    out.counts = cl;
    const uint64_t denom = uint64_t(cl.n_i) + cl.n_j + cl.n_k;
    out.defined = denom > 0;
    out.di = out.defined ? (double(cl.n_i) - double(cl.n_j)) / double(denom) : 0.0;
    return out;
}

} // namespace

CiterClassification classify_citers(const CitationGraph& graph, PaperNode fp,
                                    const DiParams& params) {
    if (params.l < 1) throw ConfigError("disruption: threshold l must be >= 1");
    Scratch s(graph.n_nodes());
    DiDiagnostics diag;
    return classify_one(graph, fp, params, s, diag);
}

DisruptionScore di_l(const CitationGraph& graph, PaperNode fp, const DiParams& params) {
    return score_from(fp, classify_citers(graph, fp, params));
}

std::vector<DisruptionScore> di_batch_serial(const CitationGraph& graph,
                                             const std::vector<PaperNode>& papers,
                                             const DiParams& params, DiDiagnostics* diag) {
    if (params.l < 1) throw ConfigError("disruption: threshold l must be >= 1");
    std::vector<DisruptionScore> out(papers.size());
    Scratch s(graph.n_nodes());
    DiDiagnostics local;
    for (size_t i = 0; i < papers.size(); ++i)
        out[i] = score_from(papers[i], classify_one(graph, papers[i], params, s, local));
    if (diag) *diag = local;
    return out;
}

std::vector<DisruptionScore> di_batch(const CitationGraph& graph,
                                      const std::vector<PaperNode>& papers,
                                      const DiParams& params, DiDiagnostics* diag) {
    if (params.l < 1) throw ConfigError("disruption: threshold l must be >= 1");
    // validate up front: an exception must not escape the parallel region
    for (PaperNode p : papers)
        if (!g_has_year(graph, p))
            throw DataError("disruption: focal paper " + std::to_string(p) + " has no year");
    std::vector<DisruptionScore> out(papers.size());
    DiDiagnostics total;

#ifdef _OPENMP
    #pragma omp parallel
    {
        Scratch s(graph.n_nodes());
        DiDiagnostics local;
        #pragma omp for schedule(dynamic, 256)
        for (int64_t i = 0; i < static_cast<int64_t>(papers.size()); ++i)
            out[i] = score_from(papers[i], classify_one(graph, papers[i], params, s, local));
        #pragma omp critical
        {
            total.citers_no_year += local.citers_no_year;
            total.citers_before_focal += local.citers_before_focal;
            total.sub_threshold_discarded += local.sub_threshold_discarded;
        }
    }
#else
    return di_batch_serial(graph, papers, params, diag);
#endif

    if (diag) *diag = total;
    return out;
}

} // namespace synergylab

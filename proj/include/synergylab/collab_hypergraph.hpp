#pragma once

#include "synergylab/corpus.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace synergylab {

// Coauthorship hypergraph of one corpus slice: nodes are authors,
// hyperedges are papers connecting all coauthors. Order g of a hyperedge
// counts distinct authors (duplicate byline entries collapse).
struct Hypergraph {
    std::vector<PaperNode> papers;     // one per hyperedge
    std::vector<uint32_t> offsets;     // CSR into members, size papers.size()+1
    std::vector<AuthorIdx> members;    // deduplicated, sorted per edge
    uint64_t n_authors = 0;            // N = |union of members|
    uint64_t byline_dups = 0;          // duplicate byline entries collapsed

    size_t n_edges() const { return papers.size(); }
    std::span<const AuthorIdx> edge(size_t i) const {
        return {members.data() + offsets[i], members.data() + offsets[i + 1]};
    }
    uint32_t order(size_t i) const { return offsets[i + 1] - offsets[i]; }
};

Hypergraph build_hypergraph(const CorpusView& view);

// Size-weighted group-size distribution p_g = g L_g / sum_x x L_x, plus
// the raw counts it is built from.
struct GroupSizeDistribution {
    std::vector<uint32_t> sizes;  // observed g values, ascending
    std::vector<uint64_t> counts; // L_g, aligned with sizes
    std::vector<double> p;        // p_g, aligned with sizes
    uint64_t n_authors = 0;       // N
    uint32_t g_max = 0;
    double k_total = 0.0; // sum_x x L_x / N

    size_t support() const { return sizes.size(); }
    double p_of(uint32_t g) const;
    uint64_t count_of(uint32_t g) const;
};

GroupSizeDistribution group_size_distribution(const Hypergraph& h);

// Builds the distribution directly from (g, L_g) counts; used by the
// synthetic generators and anywhere a hypergraph is not needed.
GroupSizeDistribution distribution_from_counts(const std::vector<std::pair<uint32_t, uint64_t>>& counts,
                                               uint64_t n_authors = 0);

double mean_team_size(const CorpusView& view);

} // namespace synergylab

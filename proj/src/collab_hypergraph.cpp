#include "synergylab/collab_hypergraph.hpp"

#include "synergylab/error.hpp"

#include <algorithm>
#include <map>

namespace synergylab {

Hypergraph build_hypergraph(const CorpusView& view) {
    Hypergraph h;
    const Corpus& c = *view.corpus;
    h.papers = view.members;
    h.offsets.reserve(view.size() + 1);
    h.offsets.push_back(0);

    std::vector<AuthorIdx> edge;
    std::vector<uint8_t> in_union(c.authors.size(), 0);
    for (PaperNode p : view.members) {
        auto [b, e] = c.byline(p);
        edge.assign(b, e);
        std::sort(edge.begin(), edge.end());
        size_t before = edge.size();
        edge.erase(std::unique(edge.begin(), edge.end()), edge.end());
        h.byline_dups += before - edge.size();
        for (AuthorIdx a : edge) {
            if (!in_union[a]) {
                in_union[a] = 1;
                ++h.n_authors;
            }
        }
        h.members.insert(h.members.end(), edge.begin(), edge.end());
        h.offsets.push_back(static_cast<uint32_t>(h.members.size()));
    }
    return h;
}

double GroupSizeDistribution::p_of(uint32_t g) const {
    auto it = std::lower_bound(sizes.begin(), sizes.end(), g);
    if (it == sizes.end() || *it != g) return 0.0;
    return p[it - sizes.begin()];
}

uint64_t GroupSizeDistribution::count_of(uint32_t g) const {
    auto it = std::lower_bound(sizes.begin(), sizes.end(), g);
    if (it == sizes.end() || *it != g) return 0;
    return counts[it - sizes.begin()];
}

GroupSizeDistribution distribution_from_counts(
    const std::vector<std::pair<uint32_t, uint64_t>>& counts, uint64_t n_authors) {
    std::map<uint32_t, uint64_t> by_g;
    for (auto [g, l] : counts)
        if (l > 0) by_g[g] += l;
    if (by_g.empty()) throw DataError("group size distribution over an empty hypergraph");

    GroupSizeDistribution d;
    d.n_authors = n_authors;
    double total = 0.0; // sum_x x L_x
    for (auto [g, l] : by_g) {
        d.sizes.push_back(g);
        d.counts.push_back(l);
        total += double(g) * double(l);
    }
    d.g_max = d.sizes.back();
    d.k_total = n_authors > 0 ? total / double(n_authors) : 0.0;
    d.p.reserve(d.sizes.size());
    for (size_t i = 0; i < d.sizes.size(); ++i)
        d.p.push_back(double(d.sizes[i]) * double(d.counts[i]) / total);
    return d;
}

GroupSizeDistribution group_size_distribution(const Hypergraph& h) {
    if (h.n_edges() == 0) throw DataError("group size distribution over an empty hypergraph");
    std::vector<std::pair<uint32_t, uint64_t>> counts;
    std::map<uint32_t, uint64_t> by_g;
    for (size_t i = 0; i < h.n_edges(); ++i) ++by_g[h.order(i)];
    counts.assign(by_g.begin(), by_g.end());
    return distribution_from_counts(counts, h.n_authors);
}

double mean_team_size(const CorpusView& view) {
    if (view.empty()) throw DataError("mean_team_size over an empty view");
    const Corpus& c = *view.corpus;
    std::vector<AuthorIdx> edge;
    double sum = 0.0;
    for (PaperNode p : view.members) {
        auto [b, e] = c.byline(p);
        edge.assign(b, e);
        std::sort(edge.begin(), edge.end());
        edge.erase(std::unique(edge.begin(), edge.end()), edge.end());
        sum += double(edge.size());
    }
    return sum / double(view.size());
}

} // namespace synergylab

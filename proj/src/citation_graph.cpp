#include "synergylab/citation_graph.hpp"

#include "synergylab/error.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>

namespace synergylab {

void CitationGraph::check_node(PaperNode p) const {
    if (p >= n_nodes_) throw DataError("unknown node " + std::to_string(p));
}

CitationGraph CitationGraph::build(const Corpus& corpus) {
    CitationGraph g;
    g.n_nodes_ = corpus.n_nodes();
    g.year_of_.resize(g.n_nodes_);
    for (PaperNode n = 0; n < g.n_nodes_; ++n) g.year_of_[n] = corpus.year_of(n);

    // counting sort by source; corpus citations are deduplicated and
    // sorted, so targets come out sorted per node as well
    g.fwd_offsets_.assign(g.n_nodes_ + 1, 0);
    uint64_t kept = 0;
    for (const auto& [src, dst] : corpus.citations) {
        if (src == dst) { ++g.self_loops_; continue; }
        ++g.fwd_offsets_[src + 1];
        ++kept;
    }
    for (uint32_t n = 0; n < g.n_nodes_; ++n) g.fwd_offsets_[n + 1] += g.fwd_offsets_[n];
    g.fwd_targets_.resize(kept);
    {
        std::vector<uint64_t> cursor(g.fwd_offsets_.begin(), g.fwd_offsets_.end() - 1);
        for (const auto& [src, dst] : corpus.citations) {
            if (src == dst) continue;
            g.fwd_targets_[cursor[src]++] = dst;
        }
    }
    g.build_transpose();
    return g;
}

void CitationGraph::build_transpose() {
    bwd_offsets_.assign(n_nodes_ + 1, 0);
    for (PaperNode dst : fwd_targets_) ++bwd_offsets_[dst + 1];
    for (uint32_t n = 0; n < n_nodes_; ++n) bwd_offsets_[n + 1] += bwd_offsets_[n];
    bwd_targets_.resize(fwd_targets_.size());
    std::vector<uint64_t> cursor(bwd_offsets_.begin(), bwd_offsets_.end() - 1);
    for (uint32_t src = 0; src < n_nodes_; ++src)
        for (uint64_t i = fwd_offsets_[src]; i < fwd_offsets_[src + 1]; ++i)
            bwd_targets_[cursor[fwd_targets_[i]]++] = src;
    // sources are visited in ascending order, so each bwd list is sorted
}

std::vector<PaperNode> CitationGraph::citers_in_window(PaperNode p, int32_t window,
                                                       WindowStats* stats) const {
    check_node(p);
    int32_t t = year_of_[p];
    if (t == kNoYear) throw DataError("citers_in_window: node " + std::to_string(p) + " has no year");
    std::vector<PaperNode> out;
    for (PaperNode q : citers(p)) {
        int32_t y = year_of_[q];
        if (y == kNoYear) {
            if (stats) ++stats->excluded_no_year;
            continue;
        }
        if (y < t) {
            if (stats) ++stats->excluded_before_focal;
            continue;
        }
        if (window >= 0 && y > t + window) continue;
        out.push_back(q);
    }
    return out;
}

namespace {

constexpr char kMagic[4] = {'S', 'Y', 'L', 'G'};
constexpr uint32_t kVersion = 1;

void write_bytes(FILE* f, const void* p, size_t n) {
    if (std::fwrite(p, 1, n, f) != n) throw DataError("graph cache: write failed");
}
void read_bytes(FILE* f, void* p, size_t n) {
    if (std::fread(p, 1, n, f) != n) throw DataError("graph cache: truncated file");
}

template <class T>
void write_vec(FILE* f, const std::vector<T>& v) {
    uint64_t n = v.size();
    write_bytes(f, &n, sizeof n);
    write_bytes(f, v.data(), n * sizeof(T));
}

template <class T>
void read_vec(FILE* f, std::vector<T>& v) {
    uint64_t n = 0;
    read_bytes(f, &n, sizeof n);
    v.resize(n);
    read_bytes(f, v.data(), n * sizeof(T));
}

} // namespace

void CitationGraph::save_cache(const std::string& path) const {
    FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw DataError("cannot open " + path + " for writing");
    write_bytes(f, kMagic, 4);
    write_bytes(f, &kVersion, sizeof kVersion);
    write_bytes(f, &n_nodes_, sizeof n_nodes_);
    write_bytes(f, &self_loops_, sizeof self_loops_);
    write_vec(f, fwd_offsets_);
    write_vec(f, fwd_targets_);
    write_vec(f, bwd_offsets_);
    write_vec(f, bwd_targets_);
    write_vec(f, year_of_);
    std::fclose(f);
}

CitationGraph CitationGraph::load_cache(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw DataError("cannot open graph cache " + path);
    CitationGraph g;
    try {
        char magic[4];
        read_bytes(f, magic, 4);
        if (std::memcmp(magic, kMagic, 4) != 0) throw DataError("graph cache: bad magic");
        uint32_t version = 0;
        read_bytes(f, &version, sizeof version);
        if (version != kVersion)
            throw DataError("graph cache: unsupported version " + std::to_string(version));
        read_bytes(f, &g.n_nodes_, sizeof g.n_nodes_);
        read_bytes(f, &g.self_loops_, sizeof g.self_loops_);
        read_vec(f, g.fwd_offsets_);
        read_vec(f, g.fwd_targets_);
        read_vec(f, g.bwd_offsets_);
        read_vec(f, g.bwd_targets_);
        read_vec(f, g.year_of_);
    } catch (...) {
        std::fclose(f);
        throw;
    }
    std::fclose(f);
    return g;
}

} // namespace synergylab

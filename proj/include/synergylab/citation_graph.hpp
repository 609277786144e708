#pragma once

#include "synergylab/corpus.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace synergylab {

// Immutable citation graph in CSR form, both directions. Node ids are the
// corpus paper-node ids (retained papers first, externals after). All
// queries are read-only and safe to call from many threads.
class CitationGraph {
  public:
    static CitationGraph build(const Corpus& corpus);

    uint32_t n_nodes() const { return n_nodes_; }
    uint64_t n_edges() const { return fwd_targets_.size(); }
    uint64_t self_loops_dropped() const { return self_loops_; }

    int32_t year_of(PaperNode p) const { return year_of_[p]; }
    bool has_year(PaperNode p) const { return year_of_[p] != kNoYear; }

    // out-neighbors: papers cited by p (its reference list), sorted
    std::span<const PaperNode> references(PaperNode p) const {
        check_node(p);
        return {fwd_targets_.data() + fwd_offsets_[p],
                fwd_targets_.data() + fwd_offsets_[p + 1]};
    }

    // in-neighbors: papers citing p, sorted
    std::span<const PaperNode> citers(PaperNode p) const {
        check_node(p);
        return {bwd_targets_.data() + bwd_offsets_[p],
                bwd_targets_.data() + bwd_offsets_[p + 1]};
    }

    uint32_t out_degree(PaperNode p) const {
        return static_cast<uint32_t>(fwd_offsets_[p + 1] - fwd_offsets_[p]);
    }
    uint32_t in_degree(PaperNode p) const {
        return static_cast<uint32_t>(bwd_offsets_[p + 1] - bwd_offsets_[p]);
    }

    struct WindowStats {
        uint32_t excluded_no_year = 0;
        uint32_t excluded_before_focal = 0;
    };

    // Citers q of p with year(q) in [t, t+w]; w < 0 means an unbounded
    // window. Citers with no year, or dated before the focal year, are
    // excluded (the latter is data noise; both are counted when stats is
    // given). Throws if p has no year.
    std::vector<PaperNode> citers_in_window(PaperNode p, int32_t window,
                                            WindowStats* stats = nullptr) const;

    bool in_window(int32_t focal_year, int32_t other_year, int32_t window) const {
        if (other_year == kNoYear || other_year < focal_year) return false;
        return window < 0 || other_year <= focal_year + window;
    }

    // Versioned little-endian binary cache; format in docs/graph_cache.md.
    void save_cache(const std::string& path) const;
    static CitationGraph load_cache(const std::string& path);

  private:
    void check_node(PaperNode p) const;
    void build_transpose();

    uint32_t n_nodes_ = 0;
    uint64_t self_loops_ = 0;
    std::vector<uint64_t> fwd_offsets_, bwd_offsets_;
    std::vector<PaperNode> fwd_targets_, bwd_targets_;
    std::vector<int32_t> year_of_;
};

} // namespace synergylab

#pragma once

#include "synergylab/citation_graph.hpp"
#include "synergylab/corpus.hpp"
#include "synergylab/disruption.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace synergylab {

// An author's record strictly before as_of_year. Counts never include the
// focal year itself; citations count only when both the cited paper and
// the citing paper predate as_of_year.
struct AuthorSnapshot {
    AuthorIdx author = 0;
    int32_t as_of_year = 0;
    uint32_t prior_pubs = 0;
    uint64_t prior_citations = 0;
    double prior_mean_di = std::numeric_limits<double>::quiet_NaN(); // NaN when no prior DI
    int32_t academic_age = 0;
    uint32_t prior_fields = 0; // count of distinct top fields published in

    bool has_prior_di() const;
};

struct TeamFeatures {
    PaperNode paper = 0;
    uint32_t g = 0; // distinct authors
    double var_age = 0, var_productivity = 0, var_citations = 0, var_di = 0,
           var_disciplinary = 0;
    double gender_proportion = std::numeric_limits<double>::quiet_NaN(); // male share among gender-valid
    bool var_di_defined = false; // every member needs a prior DI record
};

struct KeyAuthorFlags {
    PaperNode paper = 0;
    bool has_key_author = false;
    bool has_high_di = false;
    bool has_high_citation = false;
    bool has_high_productivity = false;
    bool thresholds_available = false; // per-(field, year) pool was large enough
    uint32_t n_key_authors = 0;
    bool key_first = false, key_middle = false, key_last = false;
};

// Nearest-rank empirical quantile: for q in (0, 1], the ceil(q n)-th
// smallest value. Throws when values is empty.
double percentile_threshold(std::vector<double> values, double q);

// Population variance (N divisor); solo teams give 0.
double population_variance(const std::vector<double>& xs);

struct FeatureOptions {
    double gender_min_prob = 0.5;
    double key_quantile = 0.90;
    size_t min_pool = 10; // authors needed before a percentile threshold is usable
    bool sample_variance = false;
};

struct TeamFeatureTable {
    std::vector<TeamFeatures> features;  // aligned with view.members
    std::vector<KeyAuthorFlags> flags;   // aligned with view.members
    std::vector<AuthorSnapshot> snapshots; // flattened per-paper bylines (deduped)
    std::vector<uint32_t> snapshot_offsets; // CSR into snapshots
    uint64_t papers_without_thresholds = 0;
    uint64_t degenerate_threshold_pools = 0; // constant-value pools (everyone "key")
};

// Single chronological sweep: snapshots, per-team heterogeneity, and
// key-author flags against per-(discipline, year) top-decile thresholds.
// di_scores must align with view.members when given (used for the
// DI-experience attribute).
TeamFeatureTable compute_team_features(const CorpusView& view, const CitationGraph& graph,
                                       const std::vector<DisruptionScore>* di_scores,
                                       const FeatureOptions& opts = FeatureOptions{});

// Point query used by tests and the CLI; scans the corpus directly.
AuthorSnapshot snapshot(AuthorIdx author, int32_t as_of_year, const Corpus& corpus,
                        const CitationGraph& graph,
                        const std::vector<DisruptionScore>* di_scores = nullptr);

} // namespace synergylab

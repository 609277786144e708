#pragma once

#include "synergylab/corpus.hpp"
#include "synergylab/disruption.hpp"
#include "synergylab/synergy.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace synergylab {

// One run's full parameterization; serialized into the output directory
// so any artifact can be traced back to its settings.
struct RunConfig {
    // [input]
    std::string papers = "papers.csv";
    std::string authors = "authors.csv";
    std::string authorships = "authorships.csv";
    std::string citations = "citations.csv";
    std::string schema_file; // optional JSON column mapping
    std::string graph_cache; // optional binary cache path (load when present, else build+save)
    int32_t year_min = 1960, year_max = 2020;
    // completeness filter applied after load; subset of {gender, top_field, year}
    std::vector<std::string> require_indicators;

    // [slicing]
    std::vector<std::string> disciplines; // empty = all observed
    int year_bin_width = 10;              // 0 = single period

    // [di]
    int di_l = 5;
    int di_window = 5; // -1 = unbounded
    bool di_discard_sub_threshold = false;

    // [fit]
    uint64_t fit_min_count = 100;
    std::vector<double> beta_starts{0.0, 0.5, 1.0, 1.5, 2.0};
    std::vector<double> gamma_starts{0.01, 0.05, 0.1, 0.25, 0.5};
    double fit_tolerance = 1e-8;
    int fit_max_iterations = 2000;
    bool fit_reduced_target = false; // literal reduced-form residual
    bool fit_weight_by_count = false;

    // [features]
    double gender_min_prob = 0.5;
    double key_quantile = 0.90;
    int64_t key_min_pool = 10;
    std::string roster_file; // optional JSON feature roster

    // [inference]
    int n_boot = 1000;
    double caliper_mult = 0.2;

    // [cluster]
    int k = 0; // 0 = select via silhouette
    int k_min = 2, k_max = 10;

    // [run]
    uint64_t seed = 42;
    int threads = 0; // 0 = library default
    std::string output_dir = "out";

    DiParams di_params() const;
    FitOptions fit_options() const;

    static RunConfig from_file(const std::string& path);
    static RunConfig from_toml(const class TomlTable& t);
    std::string to_toml() const;
};

// FNV-1a over the file bytes; the run manifest records one per input.
uint64_t file_content_hash(const std::string& path);

extern const char* const kToolVersion;

} // namespace synergylab

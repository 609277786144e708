#pragma once

#include "synergylab/collab_hypergraph.hpp"
#include "synergylab/corpus.hpp"
#include "synergylab/rng.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace synergylab {

// ---- focused generators: each plants known ground truth and hands it
// back so acceptance tests never re-derive truth from generated data ----

// Team sizes with p_g proportional to g^(beta-1) e^(-gamma (g-1)) on
// 1..g_max. g_max = 0 requests an unbounded support, which is only an
// error path (the distribution must be truncated to be sampled).
std::vector<uint32_t> gen_team_sizes(double beta, double gamma, uint32_t g_max, uint64_t n,
                                     Rng& rng);

// The idealized distribution itself: exact p_g of the planted model with
// uniform large L_g so every size clears the fitting cutoff. Feeding this
// through empirical_synergy and fit_synergy closes the forward-model loop.
GroupSizeDistribution planted_distribution(double beta, double gamma, uint32_t g_max,
                                           uint64_t count_per_size = 1000000);

struct DiPlant {
    PaperNode node = 0;
    uint32_t n_i = 0, n_j = 0, n_k = 0;
    double di = 0;
    bool defined = false;
};

struct DiPlantCorpus {
    Corpus corpus;
    std::vector<DiPlant> plants; // aligned with the focal papers
    std::vector<PaperNode> focal_papers;
};

// Builds an in-memory corpus where each focal paper has exactly the given
// (n_i, n_j, n_k) under threshold l and the given window: every focal
// paper gets its own private references and citers, so classifications
// cannot interfere.
DiPlantCorpus gen_citation_structure(const std::vector<std::array<uint32_t, 3>>& planted,
                                     int l, int32_t window);

struct MediationScenario {
    Eigen::VectorXd g, m, y;
    double a = 0, b = 0, c_prime = 0; // ledger
};
MediationScenario gen_mediation(size_t n, double a, double b, double c_prime, double noise_sd,
                                uint64_t seed);

// direct +, indirect -: m tracks g, y rewards g but penalizes m
MediationScenario gen_suppression(size_t n, double noise_sd, uint64_t seed);

struct ModerationScenario {
    Eigen::VectorXd g, r, w, y;
    std::array<double, 5> beta{}; // b0..b4 ledger
};
ModerationScenario gen_moderation(size_t n, double b4, double noise_sd, uint64_t seed);

struct PsmScenario {
    Eigen::VectorXd y;
    std::vector<uint8_t> treated;
    Eigen::MatrixXd covariates;
    std::vector<std::string> covariate_names;
    double tau = 0; // ledger
};
// Treatment assignment depends on the covariates, and so does the
// outcome: the naive difference in means is biased, the matched ATT is
// not. confounding = 0 gives a randomized design.
PsmScenario gen_psm(size_t n, double tau, double confounding, double noise_sd, uint64_t seed);

struct BlobScenario {
    Eigen::MatrixXd data;
    std::vector<uint32_t> labels; // ledger
    Eigen::MatrixXd centers;
};
BlobScenario gen_blobs(size_t n_per_blob, int k, int dim, double separation, double noise_sd,
                       uint64_t seed);

// ---- full synthetic corpus (career model) for end-to-end runs ----

struct SliceSpec {
    std::string field;
    double beta = 1.0;
    double gamma = 0.3;
};

struct CorpusSpec {
    uint64_t seed = 42;
    uint64_t n_papers = 20000;
    uint32_t n_authors = 2000;
    int32_t year_min = 1960, year_max = 2020;
    uint32_t g_max = 20;
    double mean_refs = 6.0;
    double elite_fraction = 0.10; // planted elite authors
    double elite_weight = 10.0;   // authorship propensity multiplier
    double elite_cite_weight = 5.0;
    double unknown_gender_rate = 0.05;
    std::vector<SliceSpec> slices{{"Physics", 1.6, 0.35},
                                  {"Philosophy", 0.0, 0.6},
                                  {"Biology", 1.2, 0.25}};
};

// Writes papers/authors/authorships/citations CSVs plus ledger.json into
// dir. Byte-identical for identical (spec, seed).
void gen_corpus(const CorpusSpec& spec, const std::string& dir);

} // namespace synergylab

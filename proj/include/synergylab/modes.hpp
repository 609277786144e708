#pragma once

#include "synergylab/corpus.hpp"
#include "synergylab/disruption.hpp"
#include "synergylab/team_features.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace synergylab {

struct FeatureMatrix {
    std::vector<std::string> names;
    Eigen::MatrixXd values;      // rows x features
    std::vector<PaperNode> rows; // paper per row
    std::vector<double> col_mean, col_sd; // standardization record (population sd)
    bool standardized = false;
    std::vector<std::string> dropped_constant;
    uint64_t rows_dropped_missing = 0;

    Eigen::Index n_rows() const { return values.rows(); }
    Eigen::Index n_cols() const { return values.cols(); }
    int column(const std::string& name) const;
};

// Default 22-feature roster over the four dimension groups. The roster is
// a deliberate reconstruction kept in one place (config/feature_roster.json
// mirrors it) so it can be revised without touching the assembly code.
const std::vector<std::string>& default_feature_roster();

struct FeatureInputs {
    const CorpusView* view = nullptr;
    const CitationGraph* graph = nullptr;
    const std::vector<DisruptionScore>* di = nullptr; // aligned with view
    const TeamFeatureTable* team = nullptr;           // aligned with view
    // per-paper synergy columns (slice-fit parameters broadcast to papers)
    const std::vector<double>* r_g = nullptr;
    const std::vector<double>* alpha = nullptr;
    const std::vector<double>* beta = nullptr;
    const std::vector<double>* gamma = nullptr;
};

// Joins the upstream tables into the named columns; rows with any missing
// feature are dropped and counted. Unknown roster names throw.
FeatureMatrix assemble_features(const FeatureInputs& in, const std::vector<std::string>& roster);

// Z-scores every column in place (population sd); constant columns are
// dropped with a warning in dropped_constant. Idempotent.
FeatureMatrix zscore(const FeatureMatrix& m);

struct KMeansResult {
    Eigen::MatrixXd centroids;
    std::vector<uint32_t> assignments;
    double wcss = 0;
    int iterations = 0;
};

// Lloyd iterations with k-means++ seeding, best of n_restarts by WCSS.
// The assignment step runs under OpenMP; the centroid update is a fixed-
// order reduction, so results do not depend on the thread count.
KMeansResult kmeans(const Eigen::MatrixXd& data, int k, uint64_t seed, int n_restarts = 10);

// One assignment pass; returns the WCSS under the given centroids. The
// serial variant is the reference implementation for tests and the
// benchmark.
double assign_points(const Eigen::MatrixXd& data, const Eigen::MatrixXd& centroids,
                     std::vector<uint32_t>& assignments);
double assign_points_serial(const Eigen::MatrixXd& data, const Eigen::MatrixXd& centroids,
                            std::vector<uint32_t>& assignments);

// Mean silhouette over all points (or a seeded subsample above
// max_exact_rows); singleton clusters score 0.
double silhouette_score(const Eigen::MatrixXd& data, const std::vector<uint32_t>& assignments,
                        int k, uint64_t seed = 1, size_t max_exact_rows = 50000);

struct KSelection {
    int k = 0;
    std::vector<int> candidates;
    std::vector<double> wcss;        // elbow curve, advisory
    std::vector<double> silhouettes; // decision rule: argmax
    bool structure_found = true;     // false when every silhouette is weak
};

KSelection select_k(const FeatureMatrix& m, int k_min = 2, int k_max = 10, uint64_t seed = 1);

struct ClusterModel {
    int k = 0;
    Eigen::MatrixXd centroids; // z-space
    std::vector<uint32_t> assignments;
    double inertia = 0;
    double silhouette = 0;
    Eigen::MatrixXd mode_profiles; // k x d per-cluster feature means (z-space)
    std::vector<double> shares;
    std::vector<std::string> feature_names;
};

ClusterModel cluster(const FeatureMatrix& m, int k, uint64_t seed);

struct OutcomeComparison {
    std::string name;
    std::vector<size_t> mode_n;
    std::vector<double> mode_mean, mode_median;
    double kw_h = 0, kw_p = 1;
};

// Distribution summary + Kruskal-Wallis of one outcome across modes;
// NaN outcomes are skipped.
OutcomeComparison mode_outcomes(const ClusterModel& model, const std::string& name,
                                const std::vector<double>& values);

struct PcaResult {
    Eigen::MatrixXd loadings; // d x n_components, orthonormal columns
    Eigen::VectorXd explained_variance_ratio;
    Eigen::MatrixXd scores; // n x n_components
    std::vector<double> col_mean, col_sd;
};

// PCA of the column-standardized data (eigenvectors of the correlation
// matrix), components ordered by explained variance, deterministic signs.
PcaResult pca(const Eigen::MatrixXd& data, int n_components);

} // namespace synergylab

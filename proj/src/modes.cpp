#include "synergylab/modes.hpp"

#include "synergylab/error.hpp"
#include "synergylab/inference.hpp"
#include "synergylab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace synergylab {

int FeatureMatrix::column(const std::string& name) const {
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return static_cast<int>(i);
    return -1;
}

const std::vector<std::string>& default_feature_roster() {
    static const std::vector<std::string> roster = {
        // heterogeneity
        "var_age", "var_productivity", "var_citations", "var_di", "var_disciplinary",
        "gender_proportion",
        // team
        "team_size", "r_g", "alpha", "beta", "gamma",
        // paper
        "di", "citations_5y", "atypicality_z", "year", "reference_count",
        // key authors
        "has_key_author", "has_high_di", "has_high_citation", "has_high_productivity",
        "n_key_authors", "key_first_position"};
    return roster;
}

FeatureMatrix assemble_features(const FeatureInputs& in, const std::vector<std::string>& roster) {
    if (!in.view || !in.graph || !in.di || !in.team)
        throw ConfigError("assemble_features: view, graph, di and team inputs are required");
    const CorpusView& view = *in.view;
    const Corpus& c = *view.corpus;
    const auto nan = std::numeric_limits<double>::quiet_NaN();

    // one row per view paper, NaN marks a missing feature
    Eigen::MatrixXd raw(view.size(), roster.size());
    for (size_t col = 0; col < roster.size(); ++col) {
        const std::string& name = roster[col];
        for (size_t i = 0; i < view.size(); ++i) {
            PaperNode p = view.members[i];
            const TeamFeatures& tf = in.team->features[i];
            const KeyAuthorFlags& kf = in.team->flags[i];
            double v = nan;
            if (name == "var_age") v = tf.var_age;
            else if (name == "var_productivity") v = tf.var_productivity;
            else if (name == "var_citations") v = tf.var_citations;
            else if (name == "var_di") v = tf.var_di_defined ? tf.var_di : nan;
            else if (name == "var_disciplinary") v = tf.var_disciplinary;
            else if (name == "gender_proportion") v = tf.gender_proportion;
            else if (name == "team_size") v = double(tf.g);
            else if (name == "r_g") v = in.r_g ? (*in.r_g)[i] : nan;
            else if (name == "alpha") v = in.alpha ? (*in.alpha)[i] : nan;
            else if (name == "beta") v = in.beta ? (*in.beta)[i] : nan;
            else if (name == "gamma") v = in.gamma ? (*in.gamma)[i] : nan;
            else if (name == "di") v = (*in.di)[i].defined ? (*in.di)[i].di : nan;
            else if (name == "citations_5y") v = double(in.graph->citers_in_window(p, 5).size());
            else if (name == "atypicality_z")
                v = c.papers[p].has_atypicality() ? c.papers[p].atypicality_z : nan;
            else if (name == "year") v = double(c.papers[p].year);
            else if (name == "reference_count") v = double(in.graph->out_degree(p));
            else if (name == "has_key_author")
                v = kf.thresholds_available ? double(kf.has_key_author) : nan;
            else if (name == "has_high_di")
                v = kf.thresholds_available ? double(kf.has_high_di) : nan;
            else if (name == "has_high_citation")
                v = kf.thresholds_available ? double(kf.has_high_citation) : nan;
            else if (name == "has_high_productivity")
                v = kf.thresholds_available ? double(kf.has_high_productivity) : nan;
            else if (name == "n_key_authors")
                v = kf.thresholds_available ? double(kf.n_key_authors) : nan;
            else if (name == "key_first_position")
                v = kf.thresholds_available ? double(kf.key_first) : nan;
            else
                throw ConfigError("assemble_features: unknown roster column '" + name + "'");
            raw(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col)) = v;
        }
    }

    FeatureMatrix m;
    m.names = roster;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
        if (raw.row(i).array().isNaN().any()) continue;
        keep.push_back(i);
    }
    m.rows_dropped_missing = view.size() - keep.size();
    m.values.resize(static_cast<Eigen::Index>(keep.size()), raw.cols());
    m.rows.reserve(keep.size());
    for (size_t i = 0; i < keep.size(); ++i) {
        m.values.row(static_cast<Eigen::Index>(i)) = raw.row(keep[i]);
        m.rows.push_back(view.members[static_cast<size_t>(keep[i])]);
    }
    return m;
}

FeatureMatrix zscore(const FeatureMatrix& m) {
    if (m.n_rows() < 2) throw DataError("zscore: need at least 2 rows");
    FeatureMatrix out;
    out.rows = m.rows;
    out.rows_dropped_missing = m.rows_dropped_missing;
    out.dropped_constant = m.dropped_constant;
    out.standardized = true;

    std::vector<Eigen::Index> keep;
    std::vector<double> means, sds;
    for (Eigen::Index c = 0; c < m.n_cols(); ++c) {
        const double mean = m.values.col(c).mean();
        const double sd = std::sqrt((m.values.col(c).array() - mean).square().sum() /
                                    double(m.n_rows()));
        if (sd <= 0) {
            out.dropped_constant.push_back(m.names[c]);
            std::fprintf(stderr, "[zscore] dropping constant column '%s'\n", m.names[c].c_str());
            continue;
        }
        keep.push_back(c);
        means.push_back(mean);
        sds.push_back(sd);
    }
    out.values.resize(m.n_rows(), static_cast<Eigen::Index>(keep.size()));
    for (size_t j = 0; j < keep.size(); ++j) {
        out.names.push_back(m.names[keep[j]]);
        out.values.col(static_cast<Eigen::Index>(j)) =
            (m.values.col(keep[j]).array() - means[j]) / sds[j];
        // the record composes across repeated standardization
        if (m.standardized && keep[j] < static_cast<Eigen::Index>(m.col_mean.size())) {
            out.col_mean.push_back(m.col_mean[keep[j]] + means[j] * m.col_sd[keep[j]]);
            out.col_sd.push_back(m.col_sd[keep[j]] * sds[j]);
        } else {
            out.col_mean.push_back(means[j]);
            out.col_sd.push_back(sds[j]);
        }
    }
    return out;
}

double assign_points_serial(const Eigen::MatrixXd& data, const Eigen::MatrixXd& centroids,
                            std::vector<uint32_t>& assignments) {
    const Eigen::Index n = data.rows(), k = centroids.rows();
    assignments.resize(n);
    double wcss = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        uint32_t arg = 0;
        for (Eigen::Index c = 0; c < k; ++c) {
            double d = (data.row(i) - centroids.row(c)).squaredNorm();
            if (d < best) { best = d; arg = static_cast<uint32_t>(c); }
        }
        assignments[i] = arg;
        wcss += best;
    }
    return wcss;
}

double assign_points(const Eigen::MatrixXd& data, const Eigen::MatrixXd& centroids,
                     std::vector<uint32_t>& assignments) {
    const Eigen::Index n = data.rows(), k = centroids.rows();
    assignments.resize(n);
    #pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        uint32_t arg = 0;
        for (Eigen::Index c = 0; c < k; ++c) {
            double d = (data.row(i) - centroids.row(c)).squaredNorm();
            if (d < best) { best = d; arg = static_cast<uint32_t>(c); }
        }
        assignments[i] = arg;
    }
    // summed in index order so the reported WCSS is independent of the
    // thread count
    double wcss = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        wcss += (data.row(i) - centroids.row(assignments[i])).squaredNorm();
    return wcss;
}

namespace {

Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& data, int k, Rng& rng) {
    const Eigen::Index n = data.rows();
    Eigen::MatrixXd centroids(k, data.cols());
    std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
    Eigen::Index first = static_cast<Eigen::Index>(rng.next_below(uint64_t(n)));
    centroids.row(0) = data.row(first);
    for (int c = 1; c < k; ++c) {
        double total = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double d = (data.row(i) - centroids.row(c - 1)).squaredNorm();
            dist2[i] = std::min(dist2[i], d);
            total += dist2[i];
        }
        double u = rng.next_double() * total;
        Eigen::Index pick = n - 1;
        double acc = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            acc += dist2[i];
            if (u < acc) { pick = i; break; }
        }
        centroids.row(c) = data.row(pick);
    }
    return centroids;
}

KMeansResult kmeans_single(const Eigen::MatrixXd& data, int k, Rng rng) {
    const Eigen::Index n = data.rows(), d = data.cols();
    KMeansResult res;
    res.centroids = kmeanspp_seed(data, k, rng);
    std::vector<uint32_t> assign(n, UINT32_MAX), prev;
    double wcss = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 100; ++it) {
        prev = assign;
        double new_wcss = assign_points(data, res.centroids, assign);
        // Lloyd never increases the objective; tolerate rounding noise
        if (new_wcss > wcss * (1 + 1e-12) && it > 0)
            throw NumericError("kmeans: WCSS increased across an iteration");
        wcss = new_wcss;
        res.iterations = it + 1;
        if (assign == prev) break;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, d);
        std::vector<uint64_t> counts(k, 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(assign[i]) += data.row(i);
            ++counts[assign[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                res.centroids.row(c) = sums.row(c) / double(counts[c]);
            } else {
                // adopt the point farthest from its centroid
                Eigen::Index far = 0;
                double best = -1;
                for (Eigen::Index i = 0; i < n; ++i) {
                    double dd = (data.row(i) - res.centroids.row(assign[i])).squaredNorm();
                    if (dd > best) { best = dd; far = i; }
                }
                res.centroids.row(c) = data.row(far);
            }
        }
    }
    res.wcss = wcss;
    res.assignments = std::move(assign);
    return res;
}

} // namespace

KMeansResult kmeans(const Eigen::MatrixXd& data, int k, uint64_t seed, int n_restarts) {
    if (k < 1) throw ConfigError("kmeans: k must be >= 1");
    if (data.rows() < k) throw DataError("kmeans: fewer rows than clusters");
    // k distinct rows must exist, otherwise some cluster stays empty
    {
        std::vector<Eigen::Index> order(data.rows());
        for (Eigen::Index i = 0; i < data.rows(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            for (Eigen::Index c = 0; c < data.cols(); ++c) {
                if (data(a, c) != data(b, c)) return data(a, c) < data(b, c);
            }
            return false;
        });
        auto rows_differ = [&](Eigen::Index a, Eigen::Index b) {
            for (Eigen::Index c = 0; c < data.cols(); ++c)
                if (data(a, c) != data(b, c)) return true;
            return false;
        };
        Eigen::Index distinct = data.rows() == 0 ? 0 : 1;
        for (size_t i = 1; i < order.size(); ++i)
            if (rows_differ(order[i], order[i - 1])) ++distinct;
        if (distinct < k)
            throw DataError("kmeans: only " + std::to_string(distinct) +
                            " distinct rows for k=" + std::to_string(k));
    }

    KMeansResult best;
    best.wcss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < n_restarts; ++r) {
        KMeansResult cur = kmeans_single(data, k, Rng::stream(seed, uint64_t(r)));
        if (cur.wcss < best.wcss) best = std::move(cur);
    }
    return best;
}

double silhouette_score(const Eigen::MatrixXd& data, const std::vector<uint32_t>& assignments,
                        int k, uint64_t seed, size_t max_exact_rows) {
    const Eigen::Index n = data.rows();
    if (static_cast<size_t>(n) != assignments.size())
        throw ConfigError("silhouette: assignment size mismatch");
    if (k < 2) return 0.0;

    std::vector<Eigen::Index> idx(n);
    for (Eigen::Index i = 0; i < n; ++i) idx[i] = i;
    if (static_cast<size_t>(n) > max_exact_rows) {
        Rng rng(seed);
        // partial Fisher-Yates for a seeded subsample
        for (size_t i = 0; i < max_exact_rows; ++i) {
            size_t j = i + static_cast<size_t>(rng.next_below(uint64_t(n - Eigen::Index(i))));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(max_exact_rows);
        std::sort(idx.begin(), idx.end());
    }

    const size_t m = idx.size();
    std::vector<size_t> cluster_n(k, 0);
    for (Eigen::Index i : idx) ++cluster_n[assignments[i]];

    // per-point scores first, summed in index order afterwards: the total
    // must not depend on the thread count
    std::vector<double> score(m, 0.0);
    #pragma omp parallel for schedule(dynamic, 64)
    for (size_t ii = 0; ii < m; ++ii) {
        const Eigen::Index i = idx[ii];
        const uint32_t ci = assignments[i];
        if (cluster_n[ci] <= 1) continue; // singleton scores 0
        std::vector<double> sum(k, 0.0);
        for (size_t jj = 0; jj < m; ++jj) {
            if (jj == ii) continue;
            const Eigen::Index j = idx[jj];
            sum[assignments[j]] += std::sqrt((data.row(i) - data.row(j)).squaredNorm());
        }
        double a = sum[ci] / double(cluster_n[ci] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == int(ci) || cluster_n[c] == 0) continue;
            b = std::min(b, sum[c] / double(cluster_n[c]));
        }
        if (std::isfinite(b)) score[ii] = (b - a) / std::max(a, b);
    }
    double total = 0;
    for (double s : score) total += s;
    return total / double(m);
}

KSelection select_k(const FeatureMatrix& m, int k_min, int k_max, uint64_t seed) {
    if (m.n_rows() < Eigen::Index(k_max) * 5)
        throw DataError("select_k: need at least 5*k_max rows");
    KSelection sel;
    double best_sil = -2;
    for (int k = k_min; k <= k_max; ++k) {
        KMeansResult km = kmeans(m.values, k, seed);
        double sil = silhouette_score(m.values, km.assignments, k, seed);
        sel.candidates.push_back(k);
        sel.wcss.push_back(km.wcss);
        sel.silhouettes.push_back(sil);
        if (sil > best_sil) {
            best_sil = sil;
            sel.k = k;
        }
    }
    sel.structure_found = best_sil >= 0.2;
    return sel;
}

ClusterModel cluster(const FeatureMatrix& m, int k, uint64_t seed) {
    if (k < 1) throw ConfigError("cluster: k must be >= 1");
    KMeansResult km = kmeans(m.values, k, seed);
    ClusterModel model;
    model.k = k;
    model.centroids = km.centroids;
    model.assignments = km.assignments;
    model.inertia = km.wcss;
    model.silhouette = k >= 2 ? silhouette_score(m.values, km.assignments, k, seed) : 0.0;
    model.feature_names = m.names;

    model.mode_profiles = Eigen::MatrixXd::Zero(k, m.n_cols());
    std::vector<size_t> counts(k, 0);
    for (Eigen::Index i = 0; i < m.n_rows(); ++i) {
        model.mode_profiles.row(km.assignments[i]) += m.values.row(i);
        ++counts[km.assignments[i]];
    }
    model.shares.resize(k);
    for (int c = 0; c < k; ++c) {
        if (counts[c] == 0) throw NumericError("cluster: empty cluster in final model");
        model.mode_profiles.row(c) /= double(counts[c]);
        model.shares[c] = double(counts[c]) / double(m.n_rows());
    }
    return model;
}

OutcomeComparison mode_outcomes(const ClusterModel& model, const std::string& name,
                                const std::vector<double>& values) {
    if (values.size() != model.assignments.size())
        throw ConfigError("mode_outcomes: outcome not aligned with assignments");
    OutcomeComparison cmp;
    cmp.name = name;
    std::vector<std::vector<double>> groups(model.k);
    for (size_t i = 0; i < values.size(); ++i)
        if (!std::isnan(values[i])) groups[model.assignments[i]].push_back(values[i]);

    cmp.mode_n.resize(model.k);
    cmp.mode_mean.assign(model.k, std::numeric_limits<double>::quiet_NaN());
    cmp.mode_median.assign(model.k, std::numeric_limits<double>::quiet_NaN());
    bool all_nonempty = true;
    for (int c = 0; c < model.k; ++c) {
        auto& gr = groups[c];
        cmp.mode_n[c] = gr.size();
        if (gr.empty()) { all_nonempty = false; continue; }
        double mean = 0;
        for (double v : gr) mean += v;
        cmp.mode_mean[c] = mean / double(gr.size());
        std::sort(gr.begin(), gr.end());
        cmp.mode_median[c] = gr.size() % 2 ? gr[gr.size() / 2]
                                           : 0.5 * (gr[gr.size() / 2 - 1] + gr[gr.size() / 2]);
    }
    if (all_nonempty && model.k >= 2) {
        auto [h, p] = kruskal_wallis(groups);
        cmp.kw_h = h;
        cmp.kw_p = p;
    }
    return cmp;
}

PcaResult pca(const Eigen::MatrixXd& data, int n_components) {
    const Eigen::Index n = data.rows(), d = data.cols();
    if (n < n_components || n < 2)
        throw DataError("pca: fewer rows than components");
    if (n_components < 1 || n_components > d)
        throw ConfigError("pca: invalid component count");

    PcaResult r;
    Eigen::MatrixXd z(n, d);
    for (Eigen::Index c = 0; c < d; ++c) {
        double mean = data.col(c).mean();
        double sd = std::sqrt((data.col(c).array() - mean).square().sum() / double(n));
        if (sd <= 0) throw DataError("pca: constant column " + std::to_string(c));
        z.col(c) = (data.col(c).array() - mean) / sd;
        r.col_mean.push_back(mean);
        r.col_sd.push_back(sd);
    }

    Eigen::MatrixXd corr = z.transpose() * z / double(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
    if (eig.info() != Eigen::Success) throw NumericError("pca: eigendecomposition failed");

    // eigenvalues ascending from Eigen; take the top ones
    r.loadings.resize(d, n_components);
    r.explained_variance_ratio.resize(n_components);
    const double total = eig.eigenvalues().sum();
    for (int c = 0; c < n_components; ++c) {
        Eigen::Index src = d - 1 - c;
        Eigen::VectorXd v = eig.eigenvectors().col(src);
        // deterministic sign: largest-magnitude coordinate positive
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v[imax] < 0) v = -v;
        r.loadings.col(c) = v;
        r.explained_variance_ratio[c] = std::max(eig.eigenvalues()[src], 0.0) / total;
    }
    r.scores = z * r.loadings;
    return r;
}

} // namespace synergylab

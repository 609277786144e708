#include "synergylab/pipeline.hpp"

#include "synergylab/collab_hypergraph.hpp"
#include "synergylab/csv.hpp"
#include "synergylab/error.hpp"
#include "synergylab/inference.hpp"
#include "synergylab/rng.hpp"
#include "synergylab/svg.hpp"

#include "json.hpp"

#include <boost/math/distributions/normal.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace synergylab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string period_label(int32_t a, int32_t b) {
    return std::to_string(a) + "-" + std::to_string(b);
}

std::string fmt_bool(bool b) { return b ? "1" : "0"; }

std::string fmt_opt(double v) { return std::isnan(v) ? "" : format_double(v); }

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << j.dump(2) << "\n";
}

} // namespace

Pipeline::Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) {
#ifdef _OPENMP
    if (cfg_.threads > 0) omp_set_num_threads(cfg_.threads);
#endif
}

std::string Pipeline::out(const std::string& name) const {
    return cfg_.output_dir + "/" + name;
}

void Pipeline::ensure_output_dir() { fs::create_directories(cfg_.output_dir); }

const Corpus& Pipeline::corpus() {
    if (!corpus_) {
        Schema schema = cfg_.schema_file.empty() ? Schema{} : Schema::from_json_file(cfg_.schema_file);
        LoadOptions opts;
        opts.year_min = cfg_.year_min;
        opts.year_max = cfg_.year_max;
        CorpusPaths paths{cfg_.papers, cfg_.authors, cfg_.authorships, cfg_.citations};
        corpus_ = load_corpus(paths, schema, opts);
        std::fprintf(stderr, "[ingest] %s\n", corpus_->stats.summary().c_str());
        if (!cfg_.require_indicators.empty()) {
            std::vector<Indicator> req;
            for (const auto& ind : cfg_.require_indicators) {
                if (ind == "gender") req.push_back(Indicator::Gender);
                else if (ind == "top_field") req.push_back(Indicator::TopField);
                else if (ind == "year") req.push_back(Indicator::Year);
            }
            FilterOptions fopts;
            fopts.gender_min_prob = cfg_.gender_min_prob;
            uint32_t before = corpus_->n_papers;
            corpus_ = filter_complete(*corpus_, req, fopts);
            std::fprintf(stderr, "[filter] %u -> %u papers with complete indicators\n", before,
                         corpus_->n_papers);
        }
    }
    return *corpus_;
}

const CitationGraph& Pipeline::graph() {
    if (!graph_) {
        if (!cfg_.graph_cache.empty() && fs::exists(cfg_.graph_cache)) {
            graph_ = CitationGraph::load_cache(cfg_.graph_cache);
            if (graph_->n_nodes() != corpus().n_nodes())
                throw DataError("graph cache does not match the corpus (" +
                                std::to_string(graph_->n_nodes()) + " vs " +
                                std::to_string(corpus().n_nodes()) + " nodes)");
        } else {
            graph_ = CitationGraph::build(corpus());
            if (!cfg_.graph_cache.empty()) graph_->save_cache(cfg_.graph_cache);
        }
    }
    return *graph_;
}

const CorpusView& Pipeline::analysis_view() {
    if (!view_) {
        CorpusView v = view_all(corpus());
        if (!cfg_.disciplines.empty()) {
            std::vector<uint8_t> wanted(corpus().fields.size(), 0);
            for (const auto& name : cfg_.disciplines) {
                int idx = corpus().fields.index_of(name);
                if (idx < 0) throw ConfigError("unknown discipline in config: " + name);
                wanted[size_t(idx)] = 1;
            }
            CorpusView f;
            f.corpus = v.corpus;
            for (PaperNode p : v.members)
                if (wanted[corpus().papers[p].top_field]) f.members.push_back(p);
            v = std::move(f);
        }
        view_ = std::move(v);
    }
    return *view_;
}

const std::vector<DisruptionScore>& Pipeline::di_scores() {
    if (!di_) {
        di_ = di_batch(graph(), analysis_view().members, cfg_.di_params(), &di_diag_);
    }
    return *di_;
}

const TeamFeatureTable& Pipeline::team_table() {
    if (!team_) {
        FeatureOptions o;
        o.gender_min_prob = cfg_.gender_min_prob;
        o.key_quantile = cfg_.key_quantile;
        o.min_pool = size_t(cfg_.key_min_pool);
        team_ = compute_team_features(analysis_view(), graph(), &di_scores(), o);
    }
    return *team_;
}

std::vector<std::pair<int32_t, int32_t>> Pipeline::periods() const {
    std::vector<std::pair<int32_t, int32_t>> out;
    if (cfg_.year_bin_width <= 0) {
        out.emplace_back(cfg_.year_min, cfg_.year_max);
        return out;
    }
    for (int32_t a = cfg_.year_min; a <= cfg_.year_max; a += cfg_.year_bin_width)
        out.emplace_back(a, std::min<int32_t>(a + cfg_.year_bin_width - 1, cfg_.year_max));
    return out;
}

const std::vector<Pipeline::SliceFit>& Pipeline::slice_fits() {
    if (fits_) return *fits_;
    fits_.emplace();
    const Corpus& c = corpus();
    const CorpusView& base = analysis_view();
    const auto pers = periods();

    // observed fields, catalog order
    std::vector<uint8_t> seen(c.fields.size(), 0);
    for (PaperNode p : base.members) seen[c.papers[p].top_field] = 1;

    // enumerate slices first; fitting then runs as an independent task per
    // slice with results landing in preallocated slots, so the output does
    // not depend on scheduling
    std::vector<CorpusView> views;
    for (size_t f = 0; f < c.fields.size(); ++f) {
        if (!seen[f]) continue;
        CorpusView field_view = slice(base, c.fields.name(f), std::nullopt);
        for (auto [a, b] : pers) {
            CorpusView v = slice(field_view, std::nullopt, std::make_pair(a, b));
            if (v.empty()) continue;
            SliceFit sf;
            sf.label = c.fields.name(f) + "|" + period_label(a, b);
            sf.field = int(f);
            sf.period_start = a;
            sf.period_end = b;
            fits_->push_back(std::move(sf));
            views.push_back(std::move(v));
        }
        // pooled over periods: the per-discipline curve
        SliceFit pooled;
        pooled.label = c.fields.name(f) + "|*";
        pooled.field = int(f);
        pooled.period_start = cfg_.year_min;
        pooled.period_end = cfg_.year_max;
        fits_->push_back(std::move(pooled));
        views.push_back(std::move(field_view));
    }
    // pooled across fields per period: the temporal curves
    for (auto [a, b] : pers) {
        CorpusView v = slice(base, std::nullopt, std::make_pair(a, b));
        if (v.empty()) continue;
        SliceFit sf;
        sf.label = "*|" + period_label(a, b);
        sf.field = -1;
        sf.period_start = a;
        sf.period_end = b;
        fits_->push_back(std::move(sf));
        views.push_back(std::move(v));
    }

    const FitOptions fit_opts = cfg_.fit_options();
    #pragma omp parallel for schedule(dynamic)
    for (size_t i = 0; i < views.size(); ++i) {
        SliceFit& sf = (*fits_)[i];
        sf.n_papers = views[i].size();
        try {
            Hypergraph h = build_hypergraph(views[i]);
            GroupSizeDistribution d = group_size_distribution(h);
            EmpiricalSynergy emp = empirical_synergy(d);
            sf.fit = fit_synergy(emp, fit_opts);
            sf.emp = std::move(emp);
        } catch (const std::exception& e) {
            sf.error = e.what();
        }
    }
    return *fits_;
}

const std::vector<double>& Pipeline::paper_r() {
    if (paper_r_) return *paper_r_;
    const auto& fits = slice_fits();
    const Corpus& c = corpus();
    const CorpusView& v = analysis_view();
    const auto pers = periods();

    // (field, period index) -> fit
    std::map<std::pair<int, size_t>, const SliceFit*> lookup;
    for (const auto& sf : fits) {
        if (sf.field < 0 || !sf.fit) continue;
        for (size_t pi = 0; pi < pers.size(); ++pi)
            if (pers[pi].first == sf.period_start && pers[pi].second == sf.period_end)
                lookup[{sf.field, pi}] = &sf;
    }
    auto period_index = [&](int32_t year) -> size_t {
        if (cfg_.year_bin_width <= 0) return 0;
        return size_t((year - cfg_.year_min) / cfg_.year_bin_width);
    };

    const auto nan = std::numeric_limits<double>::quiet_NaN();
    paper_r_.emplace(v.size(), nan);
    paper_alpha_.emplace(v.size(), nan);
    paper_beta_.emplace(v.size(), nan);
    paper_gamma_.emplace(v.size(), nan);
    const auto& team = team_table();
    for (size_t i = 0; i < v.size(); ++i) {
        PaperNode p = v.members[i];
        auto it = lookup.find({int(c.papers[p].top_field), period_index(c.papers[p].year)});
        if (it == lookup.end()) continue;
        const SynergyFit& fit = *it->second->fit;
        (*paper_r_)[i] = R_at(fit, double(team.features[i].g));
        (*paper_alpha_)[i] = fit.alpha;
        (*paper_beta_)[i] = fit.beta;
        (*paper_gamma_)[i] = fit.gamma;
    }
    return *paper_r_;
}

const std::vector<double>& Pipeline::paper_alpha() { paper_r(); return *paper_alpha_; }
const std::vector<double>& Pipeline::paper_beta() { paper_r(); return *paper_beta_; }
const std::vector<double>& Pipeline::paper_gamma() { paper_r(); return *paper_gamma_; }

// ---------------------------------------------------------------- ingest

void Pipeline::cmd_ingest() {
    ensure_output_dir();
    const Corpus& c = corpus();
    const CitationGraph& g = graph();
    json j;
    const auto& st = c.stats;
    j["papers_read"] = st.papers_read;
    j["papers_kept"] = st.papers_kept;
    j["papers_malformed"] = st.papers_malformed;
    j["papers_without_authors"] = st.papers_without_authors;
    j["authors_read"] = st.authors_read;
    j["authors_kept"] = st.authors_kept;
    j["authors_malformed"] = st.authors_malformed;
    j["gender_demoted"] = st.gender_demoted;
    j["authorships_read"] = st.authorships_read;
    j["citations_read"] = st.citations_read;
    j["citations_kept"] = st.citations_kept;
    j["citations_duplicate"] = st.citations_duplicate;
    j["citations_malformed"] = st.citations_malformed;
    j["external_nodes"] = st.external_nodes;
    j["graph_nodes"] = g.n_nodes();
    j["graph_edges"] = g.n_edges();
    j["graph_self_loops_dropped"] = g.self_loops_dropped();
    write_json(out("ingest_summary.json"), j);
}

// -------------------------------------------------------------------- di

void Pipeline::cmd_di() {
    ensure_output_dir();
    const auto& scores = di_scores();
    const Corpus& c = corpus();
    const CorpusView& v = analysis_view();
    CsvWriter w(out("di.csv"), {"paper_id", "n_i", "n_j", "n_k", "di", "defined"});
    for (size_t i = 0; i < scores.size(); ++i) {
        const auto& s = scores[i];
        w.row({c.node_ids[v.members[i]], std::to_string(s.counts.n_i),
               std::to_string(s.counts.n_j), std::to_string(s.counts.n_k),
               s.defined ? format_double(s.di) : "", fmt_bool(s.defined)});
    }
    json diag;
    diag["l"] = cfg_.di_l;
    diag["window"] = cfg_.di_window;
    diag["citers_no_year"] = di_diag_.citers_no_year;
    diag["citers_before_focal"] = di_diag_.citers_before_focal;
    diag["sub_threshold_discarded"] = di_diag_.sub_threshold_discarded;
    write_json(out("di_diagnostics.json"), diag);
}

// ----------------------------------------------------------------- hyper

void Pipeline::cmd_hyper() {
    ensure_output_dir();
    const Corpus& c = corpus();
    const CorpusView& base = analysis_view();

    std::vector<uint8_t> seen(c.fields.size(), 0);
    for (PaperNode p : base.members) seen[c.papers[p].top_field] = 1;

    {
        CsvWriter w(out("pg.csv"), {"slice", "g", "L_g", "p_g"});
        auto emit = [&](const std::string& label, const CorpusView& v) {
            if (v.empty()) return;
            GroupSizeDistribution d = group_size_distribution(build_hypergraph(v));
            for (size_t i = 0; i < d.support(); ++i)
                w.row({label, std::to_string(d.sizes[i]), std::to_string(d.counts[i]),
                       format_double(d.p[i])});
        };
        for (size_t f = 0; f < c.fields.size(); ++f) {
            if (!seen[f]) continue;
            emit(c.fields.name(f), slice(base, c.fields.name(f), std::nullopt));
        }
        for (auto [a, b] : periods())
            emit("*|" + period_label(a, b), slice(base, std::nullopt, std::make_pair(a, b)));
    }
    {
        CsvWriter w(out("teamsize.csv"), {"slice", "year", "mean_g"});
        auto emit = [&](const std::string& label, const CorpusView& v) {
            for (int32_t y = cfg_.year_min; y <= cfg_.year_max; ++y) {
                CorpusView yv = slice(v, std::nullopt, std::make_pair(y, y));
                if (yv.empty()) continue;
                w.row({label, std::to_string(y), format_double(mean_team_size(yv))});
            }
        };
        emit("*", base);
        for (size_t f = 0; f < c.fields.size(); ++f) {
            if (!seen[f]) continue;
            emit(c.fields.name(f), slice(base, c.fields.name(f), std::nullopt));
        }
    }
}

// ----------------------------------------------------------- synergy-fit

void Pipeline::cmd_synergy_fit() {
    ensure_output_dir();
    const auto& fits = slice_fits();

    json all = json::object();
    for (const auto& sf : fits) {
        json j;
        j["n_papers"] = sf.n_papers;
        if (sf.fit) {
            const SynergyFit& fit = *sf.fit;
            j["alpha"] = fit.alpha;
            j["beta"] = fit.beta;
            j["gamma"] = fit.gamma;
            j["r_squared"] = fit.r_squared;
            j["rss"] = fit.rss;
            j["n_starts"] = fit.n_starts;
            j["included_sizes"] = fit.included_sizes;
            j["excluded_sizes"] = fit.excluded_sizes;
            GroupSizeOptimum opt = optimal_group_size(fit);
            j["optimum"] = optimum_kind_name(opt.kind);
            if (opt.kind == OptimumKind::Interior) j["g_star"] = opt.g_star;
            json trace = json::array();
            for (const auto& tr : fit.trace)
                trace.push_back({{"beta0", tr.beta0},
                                 {"gamma0", tr.gamma0},
                                 {"beta", tr.beta},
                                 {"gamma", tr.gamma},
                                 {"rss", tr.rss},
                                 {"iterations", tr.iterations},
                                 {"converged", tr.converged}});
            j["starts"] = std::move(trace);
        } else {
            j["error"] = sf.error;
        }
        all[sf.label] = std::move(j);
    }
    write_json(out("fits.json"), all);

    CsvWriter w(out("rg_curves.csv"), {"slice", "g", "R_emp", "R_model"});
    for (const auto& sf : fits) {
        if (!sf.fit || !sf.emp) continue;
        const auto& emp = *sf.emp;
        for (size_t i = 0; i < emp.sizes.size(); ++i)
            w.row({sf.label, std::to_string(emp.sizes[i]), format_double(emp.R_emp[i]),
                   format_double(R_at(*sf.fit, double(emp.sizes[i])))});
    }
}

// -------------------------------------------------------------- features

void Pipeline::cmd_features() {
    ensure_output_dir();
    const Corpus& c = corpus();
    const CorpusView& v = analysis_view();
    const auto& table = team_table();
    {
        CsvWriter w(out("team_features.csv"),
                    {"paper_id", "g", "var_age", "var_productivity", "var_citations", "var_di",
                     "var_di_defined", "var_disciplinary", "gender_proportion"});
        for (size_t i = 0; i < v.size(); ++i) {
            const TeamFeatures& tf = table.features[i];
            w.row({c.node_ids[v.members[i]], std::to_string(tf.g), format_double(tf.var_age),
                   format_double(tf.var_productivity), format_double(tf.var_citations),
                   tf.var_di_defined ? format_double(tf.var_di) : "", fmt_bool(tf.var_di_defined),
                   format_double(tf.var_disciplinary), fmt_opt(tf.gender_proportion)});
        }
    }
    {
        CsvWriter w(out("key_flags.csv"),
                    {"paper_id", "has_key_author", "has_high_di", "has_high_citation",
                     "has_high_productivity", "n_key_authors", "thresholds_available", "key_first",
                     "key_middle", "key_last"});
        for (size_t i = 0; i < v.size(); ++i) {
            const KeyAuthorFlags& kf = table.flags[i];
            w.row({c.node_ids[v.members[i]], fmt_bool(kf.has_key_author), fmt_bool(kf.has_high_di),
                   fmt_bool(kf.has_high_citation), fmt_bool(kf.has_high_productivity),
                   std::to_string(kf.n_key_authors), fmt_bool(kf.thresholds_available),
                   fmt_bool(kf.key_first), fmt_bool(kf.key_middle), fmt_bool(kf.key_last)});
        }
    }
}

// --------------------------------------------------------------- mediate

void Pipeline::cmd_mediate() {
    ensure_output_dir();
    const Corpus& c = corpus();
    const CorpusView& v = analysis_view();
    const auto& di = di_scores();
    const auto& team = team_table();
    const auto& r = paper_r();

    CsvWriter w(out("mediation.csv"),
                {"discipline", "n", "total_effect", "p_total", "path_a", "p_a", "path_b", "p_b",
                 "direct_effect", "p_direct", "indirect_effect", "boot_ci_low", "boot_ci_high",
                 "p_indirect", "proportion_mediated_pct", "proportion_defined", "suppression",
                 "status"});
    for (size_t f = 0; f < c.fields.size(); ++f) {
        std::vector<double> gs, ms, ys;
        for (size_t i = 0; i < v.size(); ++i) {
            if (c.papers[v.members[i]].top_field != f) continue;
            if (!di[i].defined || std::isnan(r[i])) continue;
            gs.push_back(double(team.features[i].g));
            ms.push_back(r[i]);
            ys.push_back(di[i].di);
        }
        if (gs.empty()) continue;
        Eigen::VectorXd ge = Eigen::Map<Eigen::VectorXd>(gs.data(), long(gs.size()));
        Eigen::VectorXd me = Eigen::Map<Eigen::VectorXd>(ms.data(), long(ms.size()));
        Eigen::VectorXd ye = Eigen::Map<Eigen::VectorXd>(ys.data(), long(ys.size()));
        std::string status = "ok";
        MediationResult res;
        try {
            res = mediate(ge, me, ye, cfg_.n_boot, Rng::stream(cfg_.seed, 900 + f).next_u64());
        } catch (const std::exception& e) {
            status = e.what();
        }
        if (status == "ok") {
            w.row({c.fields.name(f), std::to_string(res.n_obs), format_double(res.total_effect),
                   format_double(res.p_total), format_double(res.path_a), format_double(res.p_a),
                   format_double(res.path_b), format_double(res.p_b),
                   format_double(res.direct_effect), format_double(res.p_direct),
                   format_double(res.indirect_effect), format_double(res.boot_ci_low),
                   format_double(res.boot_ci_high), format_double(res.p_indirect),
                   res.proportion_defined ? format_double(100.0 * res.proportion_mediated) : "",
                   fmt_bool(res.proportion_defined), fmt_bool(res.suppression), status});
        } else {
            w.row({c.fields.name(f), std::to_string(gs.size()), "", "", "", "", "", "", "", "",
                   "", "", "", "", "", "0", "0", status});
        }
    }
}

// -------------------------------------------------------------- moderate

void Pipeline::cmd_moderate() {
    ensure_output_dir();
    const Corpus& c = corpus();
    const CorpusView& v = analysis_view();
    const auto& di = di_scores();
    const auto& team = team_table();
    const auto& r = paper_r();

    const std::vector<std::string> moderators = {"var_age",          "var_productivity",
                                                 "var_citations",    "var_di",
                                                 "var_disciplinary", "gender_proportion"};
    CsvWriter w(out("moderation.csv"), {"discipline", "moderator", "n", "beta4", "se", "ci_low",
                                        "ci_high", "p", "r_squared", "status"});
    for (size_t f = 0; f < c.fields.size(); ++f) {
        for (const auto& mod : moderators) {
            std::vector<double> gs, rs, ws, ys;
            for (size_t i = 0; i < v.size(); ++i) {
                if (c.papers[v.members[i]].top_field != f) continue;
                if (!di[i].defined || std::isnan(r[i])) continue;
                const TeamFeatures& tf = team.features[i];
                double wv;
                if (mod == "var_age") wv = tf.var_age;
                else if (mod == "var_productivity") wv = tf.var_productivity;
                else if (mod == "var_citations") wv = tf.var_citations;
                else if (mod == "var_di") {
                    if (!tf.var_di_defined) continue;
                    wv = tf.var_di;
                } else if (mod == "var_disciplinary") wv = tf.var_disciplinary;
                else wv = tf.gender_proportion;
                if (std::isnan(wv)) continue;
                gs.push_back(double(tf.g));
                rs.push_back(r[i]);
                ws.push_back(wv);
                ys.push_back(di[i].di);
            }
            if (gs.empty()) continue;
            std::string status = "ok";
            OlsResult res;
            try {
                Eigen::VectorXd ge = Eigen::Map<Eigen::VectorXd>(gs.data(), long(gs.size()));
                Eigen::VectorXd re = Eigen::Map<Eigen::VectorXd>(rs.data(), long(rs.size()));
                Eigen::VectorXd we = Eigen::Map<Eigen::VectorXd>(ws.data(), long(ws.size()));
                Eigen::VectorXd ye = Eigen::Map<Eigen::VectorXd>(ys.data(), long(ys.size()));
                res = moderate(ye, ge, re, we);
            } catch (const std::exception& e) {
                status = e.what();
            }
            if (status == "ok") {
                w.row({c.fields.name(f), mod, std::to_string(gs.size()),
                       format_double(res.coefficients[4]), format_double(res.standard_errors[4]),
                       format_double(res.ci_low[4]), format_double(res.ci_high[4]),
                       format_double(res.p_values[4]), format_double(res.r_squared), status});
            } else {
                w.row({c.fields.name(f), mod, std::to_string(gs.size()), "", "", "", "", "", "",
                       status});
            }
        }
    }
}

// ------------------------------------------------------------------- psm

void Pipeline::cmd_psm() {
    ensure_output_dir();
    const Corpus& c = corpus();
    const CorpusView& v = analysis_view();
    const auto& di = di_scores();
    const auto& team = team_table();
    const auto& r = paper_r();

    const std::vector<std::string> treatments = {"has_key_author", "has_high_di",
                                                 "has_high_citation", "has_high_productivity"};
    const std::vector<std::string> cov_names = {"year",          "team_size", "r_g",
                                                "var_age",       "var_di",    "gender_proportion",
                                                "var_disciplinary", "var_productivity"};
    boost::math::normal_distribution<double> normal01;

    CsvWriter w(out("psm.csv"), {"discipline", "treatment", "n", "n_treated", "n_matched", "att",
                                 "se", "p", "caliper", "status"});
    CsvWriter wb(out("psm_balance.csv"),
                 {"discipline", "treatment", "covariate", "smd_before", "smd_after"});
    for (size_t f = 0; f < c.fields.size(); ++f) {
        // rows with every covariate defined
        std::vector<size_t> rows;
        for (size_t i = 0; i < v.size(); ++i) {
            if (c.papers[v.members[i]].top_field != f) continue;
            if (!di[i].defined || std::isnan(r[i])) continue;
            const TeamFeatures& tf = team.features[i];
            if (!tf.var_di_defined || std::isnan(tf.gender_proportion)) continue;
            if (!team.flags[i].thresholds_available) continue;
            rows.push_back(i);
        }
        if (rows.empty()) continue;
        Eigen::VectorXd y(rows.size());
        Eigen::MatrixXd cov(rows.size(), cov_names.size());
        for (size_t k = 0; k < rows.size(); ++k) {
            size_t i = rows[k];
            const TeamFeatures& tf = team.features[i];
            y[long(k)] = di[i].di;
            cov(long(k), 0) = double(c.papers[v.members[i]].year);
            cov(long(k), 1) = double(tf.g);
            cov(long(k), 2) = r[i];
            cov(long(k), 3) = tf.var_age;
            cov(long(k), 4) = tf.var_di;
            cov(long(k), 5) = tf.gender_proportion;
            cov(long(k), 6) = tf.var_disciplinary;
            cov(long(k), 7) = tf.var_productivity;
        }
        for (const auto& treat : treatments) {
            std::vector<uint8_t> t(rows.size());
            for (size_t k = 0; k < rows.size(); ++k) {
                const KeyAuthorFlags& kf = team.flags[rows[k]];
                bool val = treat == "has_key_author"      ? kf.has_key_author
                           : treat == "has_high_di"       ? kf.has_high_di
                           : treat == "has_high_citation" ? kf.has_high_citation
                                                          : kf.has_high_productivity;
                t[k] = val ? 1 : 0;
            }
            std::string status = "ok";
            MatchResult res;
            try {
                res = psm_att(y, t, cov, cov_names, cfg_.caliper_mult);
            } catch (const std::exception& e) {
                status = e.what();
            }
            if (status == "ok") {
                double z = res.se > 0 ? res.att / res.se : 0.0;
                double p = 2.0 * boost::math::cdf(boost::math::complement(normal01, std::fabs(z)));
                w.row({c.fields.name(f), treat, std::to_string(rows.size()),
                       std::to_string(res.n_treated), std::to_string(res.n_matched),
                       format_double(res.att), format_double(res.se), format_double(p),
                       format_double(res.caliper), status});
                for (const auto& b : res.balance)
                    wb.row({c.fields.name(f), treat, b.name, format_double(b.smd_before),
                            format_double(b.smd_after)});
            } else {
                w.row({c.fields.name(f), treat, std::to_string(rows.size()), "", "", "", "", "",
                       "", status});
            }
        }
    }
}

// --------------------------------------------------------------- cluster

const FeatureMatrix& Pipeline::feature_matrix() {
    if (!features_z_) {
        std::vector<std::string> roster = default_feature_roster();
        if (!cfg_.roster_file.empty()) {
            std::ifstream in(cfg_.roster_file);
            if (!in) throw ConfigError("cannot open roster file " + cfg_.roster_file);
            json j;
            in >> j;
            roster = j.get<std::vector<std::string>>();
        }
        FeatureInputs fin;
        fin.view = &analysis_view();
        fin.graph = &graph();
        fin.di = &di_scores();
        fin.team = &team_table();
        fin.r_g = &paper_r();
        fin.alpha = &paper_alpha();
        fin.beta = &paper_beta();
        fin.gamma = &paper_gamma();
        features_ = assemble_features(fin, roster);
        features_z_ = zscore(*features_);
    }
    return *features_z_;
}

const ClusterModel& Pipeline::cluster_model() {
    if (!cluster_) {
        const FeatureMatrix& m = feature_matrix();
        int k = cfg_.k;
        if (k <= 0) {
            int k_max = cfg_.k_max;
            while (k_max > cfg_.k_min && m.n_rows() < Eigen::Index(k_max) * 5) --k_max;
            k_selection_ = select_k(m, cfg_.k_min, k_max, cfg_.seed);
            k = k_selection_->k;
        }
        cluster_ = cluster(m, k, cfg_.seed);
    }
    return *cluster_;
}

void Pipeline::cmd_cluster() {
    ensure_output_dir();
    const Corpus& c = corpus();
    const FeatureMatrix& m = feature_matrix();
    const ClusterModel& model = cluster_model();

    if (k_selection_) {
        CsvWriter w(out("cluster_selection.csv"), {"k", "wcss", "silhouette", "chosen"});
        for (size_t i = 0; i < k_selection_->candidates.size(); ++i)
            w.row({std::to_string(k_selection_->candidates[i]),
                   format_double(k_selection_->wcss[i]),
                   format_double(k_selection_->silhouettes[i]),
                   fmt_bool(k_selection_->candidates[i] == k_selection_->k)});
    }
    {
        CsvWriter w(out("modes.csv"), {"paper_id", "mode"});
        for (Eigen::Index i = 0; i < m.n_rows(); ++i)
            w.row({c.node_ids[m.rows[size_t(i)]], std::to_string(model.assignments[size_t(i)])});
    }
    {
        CsvWriter w(out("mode_profiles.csv"), {"mode", "share", "feature", "mean_z"});
        for (int mode = 0; mode < model.k; ++mode)
            for (size_t col = 0; col < model.feature_names.size(); ++col)
                w.row({std::to_string(mode), format_double(model.shares[size_t(mode)]),
                       model.feature_names[col],
                       format_double(model.mode_profiles(mode, Eigen::Index(col)))});
    }
    {
        // outcome comparisons on DI, 5-year citations, atypicality
        const auto nan = std::numeric_limits<double>::quiet_NaN();
        std::map<PaperNode, size_t> row_of;
        const CorpusView& v = analysis_view();
        for (size_t i = 0; i < v.size(); ++i) row_of[v.members[i]] = i;
        const auto& di = di_scores();
        std::vector<double> o_di, o_cite, o_aty;
        for (Eigen::Index i = 0; i < m.n_rows(); ++i) {
            PaperNode p = m.rows[size_t(i)];
            size_t vi = row_of[p];
            o_di.push_back(di[vi].defined ? di[vi].di : nan);
            o_cite.push_back(double(graph().citers_in_window(p, 5).size()));
            o_aty.push_back(c.papers[p].has_atypicality() ? c.papers[p].atypicality_z : nan);
        }
        CsvWriter w(out("mode_outcomes.csv"),
                    {"outcome", "mode", "n", "mean", "median", "kw_h", "kw_p"});
        for (const auto& [name, vals] :
             std::vector<std::pair<std::string, const std::vector<double>*>>{
                 {"di", &o_di}, {"citations_5y", &o_cite}, {"atypicality_z", &o_aty}}) {
            OutcomeComparison cmp = mode_outcomes(model, name, *vals);
            for (int mode = 0; mode < model.k; ++mode)
                w.row({name, std::to_string(mode), std::to_string(cmp.mode_n[size_t(mode)]),
                       fmt_opt(cmp.mode_mean[size_t(mode)]), fmt_opt(cmp.mode_median[size_t(mode)]),
                       format_double(cmp.kw_h), format_double(cmp.kw_p)});
        }
    }
    {
        // shares by discipline and by decade
        std::vector<std::vector<size_t>> by_field(c.fields.size(),
                                                  std::vector<size_t>(model.k, 0));
        std::map<int32_t, std::vector<size_t>> by_decade;
        for (Eigen::Index i = 0; i < m.n_rows(); ++i) {
            PaperNode p = m.rows[size_t(i)];
            uint32_t mode = model.assignments[size_t(i)];
            by_field[c.papers[p].top_field][mode]++;
            int32_t decade = c.papers[p].year / 10 * 10;
            auto& vec = by_decade[decade];
            if (vec.empty()) vec.assign(model.k, 0);
            vec[mode]++;
        }
        CsvWriter wf(out("mode_by_discipline.csv"), {"discipline", "mode", "n", "share"});
        for (size_t f = 0; f < c.fields.size(); ++f) {
            size_t total = 0;
            for (auto n : by_field[f]) total += n;
            if (total == 0) continue;
            for (int mode = 0; mode < model.k; ++mode)
                wf.row({c.fields.name(f), std::to_string(mode),
                        std::to_string(by_field[f][size_t(mode)]),
                        format_double(double(by_field[f][size_t(mode)]) / double(total))});
        }
        CsvWriter wd(out("mode_by_decade.csv"), {"decade", "mode", "n", "share"});
        for (const auto& [decade, counts] : by_decade) {
            size_t total = 0;
            for (auto n : counts) total += n;
            for (int mode = 0; mode < model.k; ++mode)
                wd.row({std::to_string(decade), std::to_string(mode),
                        std::to_string(counts[size_t(mode)]),
                        format_double(double(counts[size_t(mode)]) / double(total))});
        }
    }
    {
        // PCA over per-discipline pooled synergy parameters
        std::vector<std::string> names;
        std::vector<std::array<double, 3>> params;
        for (const auto& sf : slice_fits()) {
            if (sf.field < 0 || !sf.fit) continue;
            if (sf.label.find("|*") == std::string::npos) continue;
            names.push_back(c.fields.name(size_t(sf.field)));
            params.push_back({sf.fit->alpha, sf.fit->beta, sf.fit->gamma});
        }
        if (names.size() >= 3) {
            Eigen::MatrixXd data(params.size(), 3);
            for (size_t i = 0; i < params.size(); ++i)
                for (int j = 0; j < 3; ++j) data(long(i), j) = params[i][size_t(j)];
            const int ncomp = 2;
            PcaResult p = pca(data, ncomp);
            KMeansResult archetypes = kmeans(p.scores, std::min<int>(3, int(names.size())), cfg_.seed);
            CsvWriter w(out("pca_synergy.csv"),
                        {"discipline", "alpha", "beta", "gamma", "pc1", "pc2", "archetype"});
            for (size_t i = 0; i < names.size(); ++i)
                w.row({names[i], format_double(params[i][0]), format_double(params[i][1]),
                       format_double(params[i][2]), format_double(p.scores(long(i), 0)),
                       format_double(p.scores(long(i), 1)),
                       std::to_string(archetypes.assignments[i])});
            CsvWriter wl(out("pca_loadings.csv"),
                         {"component", "alpha", "beta", "gamma", "explained_variance_ratio"});
            for (int comp = 0; comp < ncomp; ++comp)
                wl.row({std::to_string(comp + 1), format_double(p.loadings(0, comp)),
                        format_double(p.loadings(1, comp)), format_double(p.loadings(2, comp)),
                        format_double(p.explained_variance_ratio[comp])});
        }
    }
}

// ---------------------------------------------------------------- report

void Pipeline::cmd_report() {
    ensure_output_dir();
    const Corpus& c = corpus();
    const auto& fits = slice_fits();

    // R(g) curves per discipline (pooled) and per period (all fields)
    {
        SvgPlot plot(720, 460, "Synergy curves by discipline", "team size g", "R(g)");
        for (const auto& sf : fits) {
            if (sf.field < 0 || !sf.fit || !sf.emp) continue;
            if (sf.label.find("|*") == std::string::npos) continue;
            std::vector<double> xs, ys;
            for (size_t i = 0; i < sf.emp->sizes.size(); ++i) {
                xs.push_back(double(sf.emp->sizes[i]));
                ys.push_back(R_at(*sf.fit, double(sf.emp->sizes[i])));
            }
            plot.add_line(xs, ys, c.fields.name(size_t(sf.field)));
        }
        plot.write(out("rg_curves.svg"));
    }
    {
        SvgPlot plot(720, 460, "Synergy curves by period (all disciplines)", "team size g", "R(g)");
        for (const auto& sf : fits) {
            if (sf.field != -1 || !sf.fit || !sf.emp) continue;
            std::vector<double> xs, ys;
            for (size_t i = 0; i < sf.emp->sizes.size(); ++i) {
                xs.push_back(double(sf.emp->sizes[i]));
                ys.push_back(R_at(*sf.fit, double(sf.emp->sizes[i])));
            }
            plot.add_line(xs, ys, period_label(sf.period_start, sf.period_end));
        }
        plot.write(out("rg_periods.svg"));
    }
    {
        SvgPlot plot(640, 460, "Fitted synergy parameters by discipline", "beta", "gamma");
        CsvWriter w(out("beta_gamma.csv"),
                    {"discipline", "alpha", "beta", "gamma", "r_squared", "optimum", "g_star"});
        std::vector<double> xs, ys;
        for (const auto& sf : fits) {
            if (sf.field < 0 || !sf.fit) continue;
            if (sf.label.find("|*") == std::string::npos) continue;
            xs.push_back(sf.fit->beta);
            ys.push_back(sf.fit->gamma);
            GroupSizeOptimum opt = optimal_group_size(*sf.fit);
            w.row({c.fields.name(size_t(sf.field)), format_double(sf.fit->alpha),
                   format_double(sf.fit->beta), format_double(sf.fit->gamma),
                   format_double(sf.fit->r_squared), optimum_kind_name(opt.kind),
                   opt.kind == OptimumKind::Interior ? format_double(opt.g_star) : ""});
        }
        plot.add_points(xs, ys, "disciplines", 4);
        plot.write(out("beta_gamma.svg"));
    }
    {
        CsvWriter w(out("beta_gamma_trend.csv"), {"period_start", "period_end", "beta", "gamma"});
        std::vector<double> xs, betas, gammas;
        for (const auto& sf : fits) {
            if (sf.field != -1 || !sf.fit) continue;
            w.row({std::to_string(sf.period_start), std::to_string(sf.period_end),
                   format_double(sf.fit->beta), format_double(sf.fit->gamma)});
            xs.push_back(double(sf.period_start));
            betas.push_back(sf.fit->beta);
            gammas.push_back(sf.fit->gamma);
        }
        if (!xs.empty()) {
            SvgPlot plot(640, 420, "Synergy parameters over time", "period start", "value");
            plot.add_line(xs, betas, "beta");
            plot.add_line(xs, gammas, "gamma");
            plot.write(out("beta_gamma_trend.svg"));
        }
    }

    // effect bubbles (mediation indirect effect, moderation beta4, PSM ATT)
    {
        cmd_mediate();
        cmd_moderate();
        cmd_psm();
        struct Effect {
            std::string discipline, analysis;
            double effect, p;
        };
        std::vector<Effect> effects;
        auto harvest = [&](const std::string& file, int disc_col, int label_col, int eff_col,
                           int p_col, const std::string& prefix) {
            CsvReader r(out(file));
            while (r.next()) {
                const auto& f = r.fields();
                if (f[size_t(eff_col)].empty()) continue;
                Effect e;
                e.discipline = std::string(f[size_t(disc_col)]);
                e.analysis = prefix.empty() ? std::string(f[size_t(label_col)])
                                            : prefix + ":" + std::string(f[size_t(label_col)]);
                e.effect = parse_double(f[size_t(eff_col)], "effect", r.line_number());
                e.p = parse_double(f[size_t(p_col)], "p", r.line_number());
                effects.push_back(std::move(e));
            }
        };
        // mediation.csv: indirect_effect col 10, p_indirect col 13
        harvest("mediation.csv", 0, 0, 10, 13, "");
        for (auto& e : effects) e.analysis = "mediation";
        // moderation.csv: beta4 col 3, p col 7; psm.csv: att col 5, p col 7
        harvest("moderation.csv", 0, 1, 3, 7, "mod");
        harvest("psm.csv", 0, 1, 5, 7, "psm");

        CsvWriter w(out("effects.csv"), {"discipline", "analysis", "effect", "p"});
        std::vector<std::string> disciplines, analyses;
        for (const auto& e : effects) {
            w.row({e.discipline, e.analysis, format_double(e.effect), format_double(e.p)});
            if (std::find(disciplines.begin(), disciplines.end(), e.discipline) == disciplines.end())
                disciplines.push_back(e.discipline);
            if (std::find(analyses.begin(), analyses.end(), e.analysis) == analyses.end())
                analyses.push_back(e.analysis);
        }
        std::vector<double> xs, ys, radii;
        std::vector<std::string> colors;
        for (const auto& e : effects) {
            xs.push_back(double(std::find(disciplines.begin(), disciplines.end(), e.discipline) -
                                disciplines.begin()));
            ys.push_back(double(std::find(analyses.begin(), analyses.end(), e.analysis) -
                                analyses.begin()));
            radii.push_back(std::min(9.0, 2.0 + (-std::log10(std::max(e.p, 1e-16)))));
            colors.push_back(e.effect >= 0 ? "#228833" : "#ee7733");
        }
        SvgPlot plot(820, 420, "Effects by discipline and analysis", "discipline index",
                     "analysis index");
        plot.add_bubbles(xs, ys, radii, colors, "");
        plot.write(out("effects_bubble.svg"));
    }

    // key-author position comparisons
    {
        const CorpusView& v = analysis_view();
        const auto& di = di_scores();
        const auto& team = team_table();
        struct Group {
            std::string name;
            double sum = 0;
            size_t n = 0;
        };
        std::vector<Group> groups = {{"with_key", 0, 0},    {"without_key", 0, 0},
                                     {"key_first", 0, 0},   {"key_non_first", 0, 0},
                                     {"key_middle", 0, 0},  {"key_non_middle", 0, 0},
                                     {"key_last", 0, 0},    {"key_non_last", 0, 0}};
        for (size_t i = 0; i < v.size(); ++i) {
            if (!di[i].defined || !team.flags[i].thresholds_available) continue;
            const KeyAuthorFlags& kf = team.flags[i];
            auto add = [&](size_t gi) {
                groups[gi].sum += di[i].di;
                groups[gi].n += 1;
            };
            add(kf.has_key_author ? 0 : 1);
            if (kf.has_key_author) {
                add(kf.key_first ? 2 : 3);
                add(kf.key_middle ? 4 : 5);
                add(kf.key_last ? 6 : 7);
            }
        }
        CsvWriter w(out("positions.csv"), {"group", "n", "mean_di"});
        std::vector<std::string> labels;
        std::vector<double> values;
        for (const auto& g : groups) {
            double mean = g.n ? g.sum / double(g.n) : 0.0;
            w.row({g.name, std::to_string(g.n), g.n ? format_double(mean) : ""});
            labels.push_back(g.name);
            values.push_back(mean);
        }
        write_bar_chart(out("positions.svg"), "Mean DI by key-author position", labels, values);
    }

    // mode heatmap
    {
        cmd_cluster();
        const ClusterModel& model = cluster_model();
        std::vector<std::string> rows, cols = model.feature_names;
        std::vector<std::vector<double>> vals;
        for (int mode = 0; mode < model.k; ++mode) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "mode %d (%.1f%%)", mode,
                          100.0 * model.shares[size_t(mode)]);
            rows.emplace_back(buf);
            std::vector<double> rowvals;
            for (Eigen::Index j = 0; j < model.mode_profiles.cols(); ++j)
                rowvals.push_back(model.mode_profiles(mode, j));
            vals.push_back(std::move(rowvals));
        }
        write_heatmap(out("mode_heatmap.svg"), "Knowledge production mode profiles (z-scores)",
                      rows, cols, vals);
    }
}

void Pipeline::write_run_manifest() {
    ensure_output_dir();
    {
        std::ofstream cfg_out(out("run_config.toml"));
        if (!cfg_out) throw DataError("cannot write run_config.toml");
        cfg_out << cfg_.to_toml();
    }
    json j;
    j["tool_version"] = kToolVersion;
    json hashes;
    for (const auto& [name, path] :
         std::vector<std::pair<std::string, std::string>>{{"papers", cfg_.papers},
                                                          {"authors", cfg_.authors},
                                                          {"authorships", cfg_.authorships},
                                                          {"citations", cfg_.citations}}) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(file_content_hash(path)));
        hashes[name] = buf;
    }
    j["input_fnv1a64"] = hashes;
    write_json(out("run_manifest.json"), j);
}

void Pipeline::run_all() {
    write_run_manifest();
    cmd_ingest();
    cmd_di();
    cmd_hyper();
    cmd_synergy_fit();
    cmd_features();
    cmd_mediate();
    cmd_moderate();
    cmd_psm();
    cmd_cluster();
    cmd_report();
}

} // namespace synergylab

#include "synergylab/team_features.hpp"

#include "synergylab/error.hpp"

#include <algorithm>
#include <cmath>

namespace synergylab {

bool AuthorSnapshot::has_prior_di() const { return !std::isnan(prior_mean_di); }

double percentile_threshold(std::vector<double> values, double q) {
    if (values.empty()) throw DataError("percentile_threshold: empty value set");
    if (q <= 0.0 || q > 1.0) throw ConfigError("percentile_threshold: q must be in (0, 1]");
    std::sort(values.begin(), values.end());
    size_t rank = static_cast<size_t>(std::ceil(q * double(values.size())));
    if (rank == 0) rank = 1;
    return values[rank - 1];
}

double population_variance(const std::vector<double>& xs) {
    if (xs.size() <= 1) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= double(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return ss / double(xs.size());
}

namespace {

double variance(const std::vector<double>& xs, bool sample) {
    if (!sample) return population_variance(xs);
    if (xs.size() <= 1) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= double(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return ss / double(xs.size() - 1);
}

// Running author state during the chronological sweep. Everything here
// reflects events strictly before the year being processed.
struct AuthorState {
    uint32_t pubs = 0;
    uint64_t citations = 0;
    double di_sum = 0.0;
    uint32_t di_count = 0;
    uint32_t field_mask = 0; // 19 top fields fit in 32 bits
    int32_t first_pub_year = 0;

    double mean_di() const {
        return di_count ? di_sum / double(di_count) : std::numeric_limits<double>::quiet_NaN();
    }
    uint32_t n_fields() const { return static_cast<uint32_t>(__builtin_popcount(field_mask)); }
};

struct PubEvent {
    int32_t year;
    AuthorIdx author;
    uint8_t field;
    bool di_defined;
    double di;
};

struct CiteEvent {
    int32_t year; // max(cited year, citing year): the year the citation becomes "prior"
    AuthorIdx author;
};

AuthorSnapshot snapshot_from_state(AuthorIdx a, int32_t year, const AuthorState& st) {
    AuthorSnapshot s;
    s.author = a;
    s.as_of_year = year;
    s.prior_pubs = st.pubs;
    s.prior_citations = st.citations;
    s.prior_mean_di = st.mean_di();
    s.academic_age = st.pubs > 0 ? year - st.first_pub_year : 0;
    s.prior_fields = st.n_fields();
    return s;
}

} // namespace

TeamFeatureTable compute_team_features(const CorpusView& view, const CitationGraph& graph,
                                       const std::vector<DisruptionScore>* di_scores,
                                       const FeatureOptions& opts) {
    const Corpus& c = *view.corpus;
    if (di_scores && di_scores->size() != view.size())
        throw ConfigError("compute_team_features: DI table does not align with the view");

    TeamFeatureTable out;
    out.features.resize(view.size());
    out.flags.resize(view.size());

    // snapshot storage is laid out up front so the sweep can fill rows in
    // chronological order while output stays in view order
    out.snapshot_offsets.assign(view.size() + 1, 0);
    {
        std::vector<AuthorIdx> tmp;
        for (uint32_t i = 0; i < view.size(); ++i) {
            auto [b, e] = c.byline(view.members[i]);
            tmp.assign(b, e);
            std::sort(tmp.begin(), tmp.end());
            tmp.erase(std::unique(tmp.begin(), tmp.end()), tmp.end());
            out.snapshot_offsets[i + 1] = out.snapshot_offsets[i] + uint32_t(tmp.size());
        }
        out.snapshots.resize(out.snapshot_offsets.back());
    }

    // chronological processing order over the view
    std::vector<uint32_t> order(view.size());
    for (uint32_t i = 0; i < view.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        int32_t ya = c.papers[view.members[a]].year, yb = c.papers[view.members[b]].year;
        return ya != yb ? ya < yb : view.members[a] < view.members[b];
    });

    // events that flip "current" facts into "prior" facts
    std::vector<PubEvent> pubs;
    std::vector<CiteEvent> cites;
    std::vector<AuthorIdx> team;
    for (uint32_t i = 0; i < view.size(); ++i) {
        PaperNode p = view.members[i];
        const auto& rec = c.papers[p];
        auto [b, e] = c.byline(p);
        team.assign(b, e);
        std::sort(team.begin(), team.end());
        team.erase(std::unique(team.begin(), team.end()), team.end());

        bool di_def = di_scores && (*di_scores)[i].defined;
        double di = di_def ? (*di_scores)[i].di : 0.0;
        for (AuthorIdx a : team) {
            pubs.push_back({rec.year, a, rec.top_field, di_def, di});
            for (PaperNode q : graph.citers(p)) {
                int32_t yq = graph.year_of(q);
                if (yq == kNoYear) continue;
                cites.push_back({std::max(rec.year, yq), a});
            }
        }
    }
    std::sort(pubs.begin(), pubs.end(),
              [](const PubEvent& a, const PubEvent& b) { return a.year < b.year; });
    std::sort(cites.begin(), cites.end(),
              [](const CiteEvent& a, const CiteEvent& b) { return a.year < b.year; });

    std::vector<AuthorState> state(c.authors.size());
    // authors with at least one absorbed publication in a field, per field
    std::vector<std::vector<AuthorIdx>> field_pool(c.fields.size());

    size_t pub_i = 0, cite_i = 0;
    auto absorb_until = [&](int32_t year) {
        for (; pub_i < pubs.size() && pubs[pub_i].year < year; ++pub_i) {
            const auto& ev = pubs[pub_i];
            AuthorState& st = state[ev.author];
            if (st.pubs == 0) st.first_pub_year = ev.year;
            ++st.pubs;
            if (ev.di_defined) {
                st.di_sum += ev.di;
                ++st.di_count;
            }
            uint32_t bit = 1u << ev.field;
            if (!(st.field_mask & bit)) {
                st.field_mask |= bit;
                field_pool[ev.field].push_back(ev.author);
            }
        }
        for (; cite_i < cites.size() && cites[cite_i].year < year; ++cite_i)
            ++state[cites[cite_i].author].citations;
    };

    struct Thresholds {
        bool pubs_ok = false, cites_ok = false, di_ok = false;
        double pubs = 0, cites = 0, di = 0;
    };
    std::vector<Thresholds> cache(c.fields.size());
    std::vector<uint8_t> cache_valid(c.fields.size(), 0);

    auto thresholds_for = [&](uint8_t field) -> const Thresholds& {
        if (cache_valid[field]) return cache[field];
        Thresholds& th = cache[field];
        th = Thresholds{};
        std::vector<double> v_pubs, v_cites, v_di;
        for (AuthorIdx a : field_pool[field]) {
            const AuthorState& st = state[a];
            v_pubs.push_back(double(st.pubs));
            v_cites.push_back(double(st.citations));
            if (st.di_count > 0) v_di.push_back(st.mean_di());
        }
        auto degen = [&](const std::vector<double>& v) {
            return *std::min_element(v.begin(), v.end()) == *std::max_element(v.begin(), v.end());
        };
        if (v_pubs.size() >= opts.min_pool) {
            th.pubs = percentile_threshold(v_pubs, opts.key_quantile);
            th.pubs_ok = true;
            if (degen(v_pubs)) ++out.degenerate_threshold_pools;
        }
        if (v_cites.size() >= opts.min_pool) {
            th.cites = percentile_threshold(v_cites, opts.key_quantile);
            th.cites_ok = true;
            if (degen(v_cites)) ++out.degenerate_threshold_pools;
        }
        if (v_di.size() >= opts.min_pool) {
            th.di = percentile_threshold(v_di, opts.key_quantile);
            th.di_ok = true;
            if (degen(v_di)) ++out.degenerate_threshold_pools;
        }
        cache_valid[field] = 1;
        return th;
    };

    std::vector<double> ages, prods, cits, dis, discs;
    std::vector<AuthorSnapshot> snaps;

    size_t oi = 0;
    while (oi < order.size()) {
        int32_t year = c.papers[view.members[order[oi]]].year;
        absorb_until(year);
        std::fill(cache_valid.begin(), cache_valid.end(), 0); // pools moved with the year

        for (; oi < order.size() && c.papers[view.members[order[oi]]].year == year; ++oi) {
            uint32_t row = order[oi];
            PaperNode p = view.members[row];
            const auto& rec = c.papers[p];
            auto [b, e] = c.byline(p);
            team.assign(b, e);
            std::sort(team.begin(), team.end());
            team.erase(std::unique(team.begin(), team.end()), team.end());

            snaps.clear();
            for (AuthorIdx a : team) snaps.push_back(snapshot_from_state(a, year, state[a]));

            TeamFeatures& tf = out.features[row];
            tf.paper = p;
            tf.g = static_cast<uint32_t>(team.size());
            ages.clear(); prods.clear(); cits.clear(); dis.clear(); discs.clear();
            uint32_t n_valid_gender = 0, n_male = 0;
            for (const auto& s : snaps) {
                ages.push_back(double(s.academic_age));
                prods.push_back(double(s.prior_pubs));
                cits.push_back(double(s.prior_citations));
                discs.push_back(double(s.prior_fields));
                if (s.has_prior_di()) dis.push_back(s.prior_mean_di);
            }
            for (AuthorIdx a : team) {
                if (c.author_gender_valid(a, opts.gender_min_prob)) {
                    ++n_valid_gender;
                    if (c.authors[a].gender == Gender::Male) ++n_male;
                }
            }
            tf.var_age = variance(ages, opts.sample_variance);
            tf.var_productivity = variance(prods, opts.sample_variance);
            tf.var_citations = variance(cits, opts.sample_variance);
            tf.var_disciplinary = variance(discs, opts.sample_variance);
            tf.var_di_defined = !dis.empty();
            tf.var_di = tf.var_di_defined ? variance(dis, opts.sample_variance) : 0.0;
            tf.gender_proportion = n_valid_gender > 0
                                       ? double(n_male) / double(n_valid_gender)
                                       : std::numeric_limits<double>::quiet_NaN();

            KeyAuthorFlags& kf = out.flags[row];
            kf.paper = p;
            const Thresholds& th = thresholds_for(rec.top_field);
            kf.thresholds_available = th.pubs_ok && th.cites_ok && th.di_ok;
            if (!kf.thresholds_available) ++out.papers_without_thresholds;

            // key status per distinct member, positions from raw byline indices
            std::vector<AuthorIdx> key_members;
            for (const auto& s : snaps) {
                bool hi_prod = th.pubs_ok && double(s.prior_pubs) >= th.pubs;
                bool hi_cite = th.cites_ok && double(s.prior_citations) >= th.cites;
                bool hi_di = th.di_ok && s.has_prior_di() && s.prior_mean_di >= th.di;
                if (hi_prod) kf.has_high_productivity = true;
                if (hi_cite) kf.has_high_citation = true;
                if (hi_di) kf.has_high_di = true;
                if (hi_prod || hi_cite || hi_di) key_members.push_back(s.author);
            }
            kf.has_key_author = !key_members.empty();
            kf.n_key_authors = static_cast<uint32_t>(key_members.size());
            const size_t byline_len = size_t(e - b);
            for (auto it = b; it != e; ++it) {
                if (!std::binary_search(key_members.begin(), key_members.end(), *it)) continue;
                size_t pos = size_t(it - b);
                if (pos == 0) kf.key_first = true;
                else if (pos + 1 == byline_len) kf.key_last = true;
                else kf.key_middle = true;
            }
            if (byline_len == 1 && kf.key_last) { kf.key_last = false; kf.key_first = true; }

            std::copy(snaps.begin(), snaps.end(), out.snapshots.begin() + out.snapshot_offsets[row]);
        }
    }
    return out;
}

AuthorSnapshot snapshot(AuthorIdx author, int32_t as_of_year, const Corpus& corpus,
                        const CitationGraph& graph,
                        const std::vector<DisruptionScore>* di_scores) {
    if (di_scores && di_scores->size() != corpus.n_papers)
        throw ConfigError("snapshot: DI table must align with corpus.papers");
    AuthorSnapshot s;
    s.author = author;
    s.as_of_year = as_of_year;
    int32_t first = 0;
    double di_sum = 0.0;
    uint32_t di_count = 0, field_mask = 0;
    for (PaperNode p = 0; p < corpus.n_papers; ++p) {
        const auto& rec = corpus.papers[p];
        if (rec.year >= as_of_year) continue;
        auto [b, e] = corpus.byline(p);
        if (std::find(b, e, author) == e) continue;
        if (s.prior_pubs == 0 || rec.year < first) first = rec.year;
        ++s.prior_pubs;
        field_mask |= 1u << rec.top_field;
        for (PaperNode q : graph.citers(p)) {
            int32_t yq = graph.year_of(q);
            if (yq != kNoYear && yq < as_of_year) ++s.prior_citations;
        }
        if (di_scores && (*di_scores)[p].defined) {
            di_sum += (*di_scores)[p].di;
            ++di_count;
        }
    }
    s.academic_age = s.prior_pubs > 0 ? as_of_year - first : 0;
    s.prior_fields = static_cast<uint32_t>(__builtin_popcount(field_mask));
    s.prior_mean_di = di_count ? di_sum / double(di_count) : std::numeric_limits<double>::quiet_NaN();
    return s;
}

} // namespace synergylab

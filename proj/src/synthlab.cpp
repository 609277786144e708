#include "synergylab/synthlab.hpp"

#include "synergylab/csv.hpp"
#include "synergylab/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace synergylab {

std::vector<uint32_t> gen_team_sizes(double beta, double gamma, uint32_t g_max, uint64_t n,
                                     Rng& rng) {
    if (g_max == 0) {
        if (gamma <= 0.0)
            throw ConfigError("gen_team_sizes: gamma = 0 with unbounded g is not normalizable");
        throw ConfigError("gen_team_sizes: a finite g_max is required for sampling");
    }
    // p_g is size-weighted (p_g = g L_g / sum x L_x), so paper counts need
    // one power of g less than the planted p_g shape
    std::vector<double> cdf(g_max);
    double acc = 0;
    for (uint32_t g = 1; g <= g_max; ++g) {
        acc += std::exp((beta - 2.0) * std::log(double(g)) - gamma * (double(g) - 1.0));
        cdf[g - 1] = acc;
    }
    for (auto& v : cdf) v /= acc;
    std::vector<uint32_t> out(n);
    for (uint64_t i = 0; i < n; ++i)
        out[i] = static_cast<uint32_t>(sample_cdf(cdf, rng.next_double())) + 1;
    return out;
}

GroupSizeDistribution planted_distribution(double beta, double gamma, uint32_t g_max,
                                           uint64_t count_per_size) {
    if (g_max < 1) throw ConfigError("planted_distribution: g_max must be >= 1");
    GroupSizeDistribution d;
    d.g_max = g_max;
    double total = 0;
    std::vector<double> w(g_max);
    for (uint32_t g = 1; g <= g_max; ++g) {
        w[g - 1] = std::exp((beta - 1.0) * std::log(double(g)) - gamma * (double(g) - 1.0));
        total += w[g - 1];
    }
    for (uint32_t g = 1; g <= g_max; ++g) {
        d.sizes.push_back(g);
        d.counts.push_back(count_per_size);
        d.p.push_back(w[g - 1] / total);
    }
    return d;
}

DiPlantCorpus gen_citation_structure(const std::vector<std::array<uint32_t, 3>>& planted, int l,
                                     int32_t window) {
    if (l < 1) throw ConfigError("gen_citation_structure: l must be >= 1");
    DiPlantCorpus out;
    Corpus& c = out.corpus;
    c.author_ids.push_back("a0");
    c.authors.push_back(AuthorRecord{});

    const int32_t t_focal = 2000;
    const int32_t t_citer = t_focal + std::min<int32_t>(window < 0 ? 1 : window, 1);
    const int32_t t_ref = t_focal - 1;

    auto add_paper = [&](std::string id, int32_t year) -> PaperNode {
        PaperNode n = static_cast<PaperNode>(c.node_ids.size());
        c.node_ids.push_back(std::move(id));
        PaperRecord rec;
        rec.year = year;
        rec.top_field = 0;
        rec.doc_type = DocType::JournalArticle;
        rec.author_begin = static_cast<uint32_t>(c.authorship_authors.size());
        c.authorship_authors.push_back(0);
        rec.author_end = static_cast<uint32_t>(c.authorship_authors.size());
        c.papers.push_back(rec);
        return n;
    };

    for (size_t f = 0; f < planted.size(); ++f) {
        const auto [ni, nj, nk] = planted[f];
        const std::string tag = std::to_string(f);
        PaperNode fp = add_paper("fp" + tag, t_focal);

        std::vector<PaperNode> refs;
        for (int r = 0; r < l; ++r) {
            PaperNode rp = add_paper("ref" + tag + "_" + std::to_string(r), t_ref);
            refs.push_back(rp);
            c.citations.emplace_back(fp, rp);
        }
        for (uint32_t i = 0; i < ni; ++i) {
            PaperNode q = add_paper("i" + tag + "_" + std::to_string(i), t_citer);
            c.citations.emplace_back(q, fp);
        }
        for (uint32_t j = 0; j < nj; ++j) {
            PaperNode q = add_paper("j" + tag + "_" + std::to_string(j), t_citer);
            c.citations.emplace_back(q, fp);
            for (PaperNode rp : refs) c.citations.emplace_back(q, rp);
        }
        for (uint32_t k = 0; k < nk; ++k) {
            PaperNode q = add_paper("k" + tag + "_" + std::to_string(k), t_citer);
            c.citations.emplace_back(q, refs.front());
        }

        DiPlant plant;
        plant.node = fp;
        plant.n_i = ni;
        plant.n_j = nj;
        plant.n_k = nk;
        const uint64_t denom = uint64_t(ni) + nj + nk;
        plant.defined = denom > 0;
        plant.di = plant.defined ? (double(ni) - double(nj)) / double(denom) : 0.0;
        out.plants.push_back(plant);
        out.focal_papers.push_back(fp);
    }
    c.n_papers = static_cast<uint32_t>(c.papers.size());
    std::sort(c.citations.begin(), c.citations.end());
    c.citations.erase(std::unique(c.citations.begin(), c.citations.end()), c.citations.end());
    return out;
}

MediationScenario gen_mediation(size_t n, double a, double b, double c_prime, double noise_sd,
                                uint64_t seed) {
    Rng rng(seed);
    MediationScenario s;
    s.a = a;
    s.b = b;
    s.c_prime = c_prime;
    s.g.resize(n);
    s.m.resize(n);
    s.y.resize(n);
    for (size_t i = 0; i < n; ++i) {
        double g = double(rng.next_below(10) + 1);
        double m = a * g + rng.normal(0, noise_sd);
        double y = c_prime * g + b * m + rng.normal(0, noise_sd);
        s.g[i] = g;
        s.m[i] = m;
        s.y[i] = y;
    }
    return s;
}

MediationScenario gen_suppression(size_t n, double noise_sd, uint64_t seed) {
    Rng rng(seed);
    MediationScenario s;
    s.a = 1.0;
    s.b = -1.0;
    s.c_prime = 1.0;
    s.g.resize(n);
    s.m.resize(n);
    s.y.resize(n);
    for (size_t i = 0; i < n; ++i) {
        double g = double(rng.next_below(10) + 1);
        double m = g + rng.normal(0, noise_sd);
        double y = g - m + rng.normal(0, noise_sd);
        s.g[i] = g;
        s.m[i] = m;
        s.y[i] = y;
    }
    return s;
}

ModerationScenario gen_moderation(size_t n, double b4, double noise_sd, uint64_t seed) {
    Rng rng(seed);
    ModerationScenario s;
    s.beta = {0.1, -0.05, 0.3, 0.2, b4};
    s.g.resize(n);
    s.r.resize(n);
    s.w.resize(n);
    s.y.resize(n);
    for (size_t i = 0; i < n; ++i) {
        double g = double(rng.next_below(10) + 1);
        double r = rng.normal(5.0, 2.0);
        double w = rng.normal(0.0, 1.0);
        double y = s.beta[0] + s.beta[1] * g + s.beta[2] * r + s.beta[3] * w + s.beta[4] * r * w +
                   rng.normal(0, noise_sd);
        s.g[i] = g;
        s.r[i] = r;
        s.w[i] = w;
        s.y[i] = y;
    }
    return s;
}

PsmScenario gen_psm(size_t n, double tau, double confounding, double noise_sd, uint64_t seed) {
    Rng rng(seed);
    PsmScenario s;
    s.tau = tau;
    s.y.resize(n);
    s.treated.resize(n);
    s.covariates.resize(n, 2);
    s.covariate_names = {"x1", "x2"};
    for (size_t i = 0; i < n; ++i) {
        double x1 = rng.normal(), x2 = rng.normal();
        // the negative intercept keeps the treated arm the smaller one, so
        // every treated unit can find a close control
        double eta = -1.0 + confounding * (x1 + x2);
        double p = 1.0 / (1.0 + std::exp(-eta));
        bool t = rng.next_double() < p;
        double y = tau * double(t) + 0.5 * confounding * (x1 + x2) + rng.normal(0, noise_sd);
        s.covariates(static_cast<Eigen::Index>(i), 0) = x1;
        s.covariates(static_cast<Eigen::Index>(i), 1) = x2;
        s.treated[i] = t ? 1 : 0;
        s.y[static_cast<Eigen::Index>(i)] = y;
    }
    return s;
}

BlobScenario gen_blobs(size_t n_per_blob, int k, int dim, double separation, double noise_sd,
                       uint64_t seed) {
    Rng rng(seed);
    BlobScenario s;
    s.centers.resize(k, dim);
    for (int c = 0; c < k; ++c)
        for (int d = 0; d < dim; ++d) s.centers(c, d) = rng.normal(0, separation);
    s.data.resize(static_cast<Eigen::Index>(n_per_blob) * k, dim);
    s.labels.resize(n_per_blob * size_t(k));
    Eigen::Index row = 0;
    for (int c = 0; c < k; ++c) {
        for (size_t i = 0; i < n_per_blob; ++i, ++row) {
            for (int d = 0; d < dim; ++d)
            s.data(row, d) = s.centers(c, d) + rng.normal(0, noise_sd);
            s.labels[static_cast<size_t>(row)] = static_cast<uint32_t>(c);
        }
    }
    return s;
}

namespace {

struct SynthAuthor {
    uint32_t id;
    size_t slice;
    int32_t arrival;
    bool elite;
    Gender gender;
    double gender_prob;
};

} // namespace

void gen_corpus(const CorpusSpec& spec, const std::string& dir) {
    if (spec.slices.empty()) throw ConfigError("gen_corpus: at least one slice required");
    Rng rng(spec.seed);

    // authors, round-robin across slices, forced early arrival for the
    // first author of each slice so every year has an eligible pool
    std::vector<SynthAuthor> authors(spec.n_authors);
    for (uint32_t a = 0; a < spec.n_authors; ++a) {
        SynthAuthor& au = authors[a];
        au.id = a;
        au.slice = a % spec.slices.size();
        au.arrival = a < spec.slices.size()
                         ? spec.year_min
                         : spec.year_min + int32_t(rng.next_below(
                               uint64_t(spec.year_max - spec.year_min - 4)));
        au.elite = rng.next_double() < spec.elite_fraction;
        double u = rng.next_double();
        if (u < spec.unknown_gender_rate) {
            au.gender = Gender::Unknown;
            au.gender_prob = 0;
        } else {
            au.gender = rng.next_double() < 0.5 ? Gender::Male : Gender::Female;
            au.gender_prob = 0.5 + 0.5 * rng.next_double();
        }
    }

    // per slice: authors sorted by arrival with prefix weights for
    // eligible-pool sampling
    const size_t n_slices = spec.slices.size();
    std::vector<std::vector<uint32_t>> pool(n_slices);
    std::vector<std::vector<double>> pool_wsum(n_slices); // prefix weight sums
    for (const auto& au : authors) pool[au.slice].push_back(au.id);
    for (size_t s = 0; s < n_slices; ++s) {
        auto& p = pool[s];
        std::sort(p.begin(), p.end(), [&](uint32_t x, uint32_t y) {
            return authors[x].arrival != authors[y].arrival ? authors[x].arrival < authors[y].arrival
                                                            : x < y;
        });
        pool_wsum[s].resize(p.size() + 1, 0.0);
        for (size_t i = 0; i < p.size(); ++i)
            pool_wsum[s][i + 1] =
                pool_wsum[s][i] + (authors[p[i]].elite ? spec.elite_weight : 1.0);
    }

    struct SynthPaper {
        int32_t year;
        size_t slice;
        std::vector<uint32_t> team;
        bool has_elite = false;
        double atypicality;
    };
    std::vector<SynthPaper> papers(spec.n_papers);

    for (uint64_t i = 0; i < spec.n_papers; ++i) {
        SynthPaper& pp = papers[i];
        pp.slice = i % n_slices;
        pp.year = spec.year_min +
                  int32_t(rng.next_below(uint64_t(spec.year_max - spec.year_min + 1)));
        pp.atypicality = rng.normal(0, 1);
        const auto& sl = spec.slices[pp.slice];
        Rng size_rng(rng.next_u64());
        uint32_t g = gen_team_sizes(sl.beta, sl.gamma, spec.g_max, 1, size_rng)[0];

        const auto& p = pool[pp.slice];
        const auto& wsum = pool_wsum[pp.slice];
        // eligible prefix: authors arrived by the paper year
        size_t lo = 0, hi = p.size();
        while (lo < hi) {
            size_t mid = (lo + hi) / 2;
            if (authors[p[mid]].arrival <= pp.year) lo = mid + 1;
            else hi = mid;
        }
        const size_t eligible = lo;
        g = std::min<uint32_t>(g, uint32_t(eligible));
        if (g == 0) g = 1; // first slice author always arrives at year_min
        const double wtot = wsum[eligible];
        while (pp.team.size() < g) {
            double u = rng.next_double() * wtot;
            size_t a = 0, b = eligible;
            while (a < b) {
                size_t mid = (a + b) / 2;
                if (u < wsum[mid + 1]) b = mid;
                else a = mid + 1;
            }
            uint32_t cand = p[a];
            if (std::find(pp.team.begin(), pp.team.end(), cand) != pp.team.end()) continue;
            pp.team.push_back(cand);
            if (authors[cand].elite) pp.has_elite = true;
        }
    }

    // stable chronological order makes reference sampling simple
    std::vector<uint32_t> order(papers.size());
    for (uint32_t i = 0; i < papers.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](uint32_t a, uint32_t b) { return papers[a].year < papers[b].year; });
    // first index in `order` whose year >= y, per year offset
    std::vector<uint32_t> year_start(size_t(spec.year_max - spec.year_min + 2), 0);
    {
        uint32_t cursor = 0;
        for (int32_t y = spec.year_min; y <= spec.year_max + 1; ++y) {
            while (cursor < order.size() && papers[order[cursor]].year < y) ++cursor;
            year_start[size_t(y - spec.year_min)] = cursor;
        }
    }

    std::vector<std::pair<uint32_t, uint32_t>> citations; // (citing, cited) by paper index
    for (uint32_t i = 0; i < papers.size(); ++i) {
        const auto& pp = papers[i];
        const uint32_t earlier = year_start[size_t(pp.year - spec.year_min)];
        if (earlier == 0) continue;
        uint64_t n_refs = rng.poisson(spec.mean_refs);
        std::vector<uint32_t> refs;
        for (uint64_t r = 0; r < n_refs && refs.size() < earlier; ++r) {
            // rejection step biases references toward elite-authored work
            uint32_t cand = 0;
            for (int attempt = 0; attempt < 64; ++attempt) {
                cand = order[rng.next_below(earlier)];
                if (papers[cand].has_elite ||
                    rng.next_double() < 1.0 / spec.elite_cite_weight)
                    break;
            }
            if (std::find(refs.begin(), refs.end(), cand) != refs.end()) continue;
            refs.push_back(cand);
        }
        for (uint32_t ref : refs) citations.emplace_back(i, ref);
    }

    // ---- emit ----
    {
        CsvWriter w(dir + "/papers.csv",
                    {"paper_id", "year", "top_field", "sub_fields", "doc_type", "atypicality_z"});
        for (uint32_t i = 0; i < papers.size(); ++i) {
            const auto& pp = papers[i];
            w.row({"p" + std::to_string(i), std::to_string(pp.year), spec.slices[pp.slice].field,
                   "", "journal_article", format_double(pp.atypicality)});
        }
    }
    {
        CsvWriter w(dir + "/authors.csv", {"author_id", "gender_label", "gender_probability"});
        for (const auto& au : authors)
            w.row({"a" + std::to_string(au.id), gender_name(au.gender),
                   au.gender == Gender::Unknown ? "" : format_double(au.gender_prob)});
    }
    {
        CsvWriter w(dir + "/authorships.csv", {"paper_id", "author_id", "position_index"});
        for (uint32_t i = 0; i < papers.size(); ++i)
            for (size_t k = 0; k < papers[i].team.size(); ++k)
                w.row({"p" + std::to_string(i), "a" + std::to_string(papers[i].team[k]),
                       std::to_string(k)});
    }
    {
        CsvWriter w(dir + "/citations.csv", {"citing_id", "cited_id"});
        for (auto [src, dst] : citations)
            w.row({"p" + std::to_string(src), "p" + std::to_string(dst)});
    }
    {
        nlohmann::json ledger;
        ledger["seed"] = spec.seed;
        ledger["n_papers"] = spec.n_papers;
        ledger["n_authors"] = spec.n_authors;
        ledger["g_max"] = spec.g_max;
        ledger["mean_refs"] = spec.mean_refs;
        ledger["elite_fraction"] = spec.elite_fraction;
        ledger["elite_weight"] = spec.elite_weight;
        ledger["elite_cite_weight"] = spec.elite_cite_weight;
        ledger["n_citations"] = citations.size();
        for (const auto& sl : spec.slices)
            ledger["slices"].push_back({{"field", sl.field}, {"beta", sl.beta}, {"gamma", sl.gamma}});
        std::vector<uint32_t> elite_ids;
        for (const auto& au : authors)
            if (au.elite) elite_ids.push_back(au.id);
        ledger["n_elite"] = elite_ids.size();
        ledger["elite_authors"] = elite_ids;
        std::ofstream out(dir + "/ledger.json");
        if (!out) throw DataError("gen_corpus: cannot write " + dir + "/ledger.json");
        out << ledger.dump(2) << "\n";
    }
}

} // namespace synergylab

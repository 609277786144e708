#include "doctest.h"

#include "synergylab/collab_hypergraph.hpp"
#include "synergylab/error.hpp"
#include "synergylab/rng.hpp"
#include "synergylab/synthlab.hpp"

#include "test_util.hpp"

#include <cmath>

using namespace synergylab;

namespace {

// papers given as author-index lists
Corpus corpus_of_teams(const std::vector<std::vector<AuthorIdx>>& teams, size_t n_authors,
                       const std::vector<int32_t>& years = {}) {
    Corpus c;
    for (size_t a = 0; a < n_authors; ++a) {
        c.author_ids.push_back("a" + std::to_string(a));
        c.authors.push_back({});
    }
    for (size_t i = 0; i < teams.size(); ++i) {
        c.node_ids.push_back("p" + std::to_string(i));
        PaperRecord rec;
        rec.year = years.empty() ? 2000 : years[i];
        rec.author_begin = uint32_t(c.authorship_authors.size());
        for (AuthorIdx a : teams[i]) c.authorship_authors.push_back(a);
        rec.author_end = uint32_t(c.authorship_authors.size());
        c.papers.push_back(rec);
    }
    c.n_papers = uint32_t(teams.size());
    return c;
}

} // namespace

TEST_SUITE("collab_hypergraph") {
    TEST_CASE("one paper with two authors") {
        Corpus c = corpus_of_teams({{0, 1}}, 2);
        Hypergraph h = build_hypergraph(view_all(c));
        CHECK(h.n_edges() == 1);
        CHECK(h.n_authors == 2);
        CHECK(h.order(0) == 2);
    }

    TEST_CASE("duplicate byline entries collapse") {
        Corpus c = corpus_of_teams({{0, 0, 1}}, 2);
        Hypergraph h = build_hypergraph(view_all(c));
        CHECK(h.order(0) == 2);
        CHECK(h.byline_dups == 1);
    }

    TEST_CASE("shared authors counted once in N") {
        Corpus c = corpus_of_teams({{0}, {0, 1}, {0, 2}}, 3);
        Hypergraph h = build_hypergraph(view_all(c));
        CHECK(h.n_authors == 3);
        uint64_t sum_g = 0;
        for (size_t i = 0; i < h.n_edges(); ++i) sum_g += h.order(i);
        CHECK(h.n_authors <= sum_g);
    }

    TEST_CASE("group size distribution: hand-computed p_g") {
        // L = {2: 3 papers, 3: 1 paper} -> p_2 = 6/9, p_3 = 3/9
        Corpus c = corpus_of_teams({{0, 1}, {1, 2}, {2, 3}, {0, 1, 2}}, 4);
        GroupSizeDistribution d = group_size_distribution(build_hypergraph(view_all(c)));
        REQUIRE(d.support() == 2);
        CHECK(d.sizes[0] == 2);
        CHECK(d.counts[0] == 3);
        CHECK(d.p[0] == doctest::Approx(6.0 / 9.0).epsilon(1e-12));
        CHECK(d.p[1] == doctest::Approx(3.0 / 9.0).epsilon(1e-12));
        CHECK(d.p_of(2) == d.p[0]);
        CHECK(d.p_of(7) == 0.0);
        CHECK(d.count_of(3) == 1);
    }

    TEST_CASE("degenerate single solo paper") {
        Corpus c = corpus_of_teams({{0}}, 1);
        GroupSizeDistribution d = group_size_distribution(build_hypergraph(view_all(c)));
        REQUIRE(d.support() == 1);
        CHECK(d.p[0] == doctest::Approx(1.0));
    }

    TEST_CASE("empty hypergraph is an error") {
        Corpus c = corpus_of_teams({}, 1);
        Hypergraph h = build_hypergraph(view_all(c));
        CHECK_THROWS_AS(group_size_distribution(h), DataError);
        CHECK_THROWS_AS(mean_team_size(view_all(c)), DataError);
    }

    TEST_CASE("normalization holds on random corpora") {
        Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<std::vector<AuthorIdx>> teams;
            size_t n_authors = 30;
            size_t n_papers = 1 + rng.next_below(60);
            for (size_t p = 0; p < n_papers; ++p) {
                std::vector<AuthorIdx> team;
                size_t g = 1 + rng.next_below(6);
                for (size_t i = 0; i < g; ++i) team.push_back(AuthorIdx(rng.next_below(n_authors)));
                teams.push_back(team);
            }
            Corpus c = corpus_of_teams(teams, n_authors);
            GroupSizeDistribution d = group_size_distribution(build_hypergraph(view_all(c)));
            double sum = 0;
            for (double p : d.p) sum += p;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
            for (uint64_t l : d.counts) CHECK(l >= 1);
        }
    }

    TEST_CASE("p_g is invariant to author relabeling") {
        std::vector<std::vector<AuthorIdx>> teams = {{0, 1}, {2}, {1, 2, 3}, {0, 3}};
        Corpus a = corpus_of_teams(teams, 4);
        // relabel authors via the permutation x -> 3 - x
        std::vector<std::vector<AuthorIdx>> relabeled;
        for (auto t : teams) {
            for (auto& x : t) x = 3 - x;
            relabeled.push_back(t);
        }
        Corpus b = corpus_of_teams(relabeled, 4);
        GroupSizeDistribution da = group_size_distribution(build_hypergraph(view_all(a)));
        GroupSizeDistribution db = group_size_distribution(build_hypergraph(view_all(b)));
        CHECK(da.sizes == db.sizes);
        CHECK(da.counts == db.counts);
        for (size_t i = 0; i < da.p.size(); ++i) CHECK(da.p[i] == doctest::Approx(db.p[i]));
    }

    TEST_CASE("merging disjoint slices' counts equals computing on the union") {
        std::vector<std::vector<AuthorIdx>> teams = {{0, 1}, {2}, {1, 2, 3}, {0, 3}, {1}, {2, 3}};
        Corpus c = corpus_of_teams(teams, 4, {1990, 1990, 1990, 2005, 2005, 2005});
        CorpusView all = view_all(c);
        auto early = slice(all, std::nullopt, std::make_pair(1980, 1999));
        auto late = slice(all, std::nullopt, std::make_pair(2000, 2020));
        GroupSizeDistribution de = group_size_distribution(build_hypergraph(early));
        GroupSizeDistribution dl = group_size_distribution(build_hypergraph(late));
        GroupSizeDistribution du = group_size_distribution(build_hypergraph(all));

        std::vector<std::pair<uint32_t, uint64_t>> merged;
        for (size_t i = 0; i < de.support(); ++i) merged.push_back({de.sizes[i], de.counts[i]});
        for (size_t i = 0; i < dl.support(); ++i) merged.push_back({dl.sizes[i], dl.counts[i]});
        GroupSizeDistribution dm = distribution_from_counts(merged);
        REQUIRE(dm.sizes == du.sizes);
        CHECK(dm.counts == du.counts);
        for (size_t i = 0; i < dm.p.size(); ++i) CHECK(dm.p[i] == doctest::Approx(du.p[i]));
    }

    TEST_CASE("planted team-size growth across period slices") {
        // early slice drawn from a small-team plant, late slice from a
        // large-team plant; the mean ratio must track the planted means
        Rng rng(91);
        auto planted_mean = [](double beta, double gamma, uint32_t g_max) {
            double num = 0, den = 0;
            for (uint32_t g = 1; g <= g_max; ++g) {
                double w = std::exp((beta - 2.0) * std::log(double(g)) - gamma * (double(g) - 1.0));
                num += double(g) * w;
                den += w;
            }
            return num / den;
        };
        auto sizes_early = gen_team_sizes(0.8, 0.5, 20, 4000, rng);
        auto sizes_late = gen_team_sizes(2.2, 0.25, 20, 4000, rng);
        std::vector<std::vector<AuthorIdx>> teams;
        std::vector<int32_t> years;
        AuthorIdx next = 0;
        auto add = [&](const std::vector<uint32_t>& sizes, int32_t year) {
            for (uint32_t g : sizes) {
                std::vector<AuthorIdx> t(g);
                for (uint32_t i = 0; i < g; ++i) t[i] = next++ % 5000;
                teams.push_back(std::move(t));
                years.push_back(year);
            }
        };
        add(sizes_early, 1960);
        add(sizes_late, 2020);
        Corpus c = corpus_of_teams(teams, 5000, years);
        CorpusView all = view_all(c);
        double m1960 = mean_team_size(slice(all, std::nullopt, std::make_pair(1960, 1960)));
        double m2020 = mean_team_size(slice(all, std::nullopt, std::make_pair(2020, 2020)));
        double want = planted_mean(2.2, 0.25, 20) / planted_mean(0.8, 0.5, 20);
        CHECK(m2020 / m1960 == doctest::Approx(want).epsilon(0.05));
        CHECK(m2020 > m1960);
    }

    TEST_CASE("mean team size") {
        Corpus c = corpus_of_teams({{0}, {0, 1, 2}}, 3);
        CHECK(mean_team_size(view_all(c)) == doctest::Approx(2.0));
        Corpus c2 = corpus_of_teams({{0, 1}, {1, 2}, {2, 3}}, 4);
        CHECK(mean_team_size(view_all(c2)) == doctest::Approx(2.0));
    }
}

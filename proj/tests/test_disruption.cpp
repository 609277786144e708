#include "doctest.h"

#include "synergylab/citation_graph.hpp"
#include "synergylab/disruption.hpp"
#include "synergylab/error.hpp"
#include "synergylab/rng.hpp"

#include "oracles.hpp"

#include <map>

using namespace synergylab;

namespace {

Corpus tiny_corpus(const std::vector<int32_t>& years,
                   const std::vector<std::pair<PaperNode, PaperNode>>& edges) {
    Corpus c;
    c.author_ids.push_back("a0");
    c.authors.push_back({});
    for (size_t i = 0; i < years.size(); ++i) {
        c.node_ids.push_back("p" + std::to_string(i));
        PaperRecord rec;
        rec.year = years[i];
        rec.author_begin = uint32_t(c.authorship_authors.size());
        c.authorship_authors.push_back(0);
        rec.author_end = uint32_t(c.authorship_authors.size());
        c.papers.push_back(rec);
    }
    c.n_papers = uint32_t(years.size());
    c.citations = edges;
    std::sort(c.citations.begin(), c.citations.end());
    c.citations.erase(std::unique(c.citations.begin(), c.citations.end()), c.citations.end());
    return c;
}

// fp=0 (2000) citing refs 1,2 (1999); citers 3..6 (2001) with mixed
// reference co-citations; node 6 cites a reference only
const std::vector<int32_t> kToyYears = {2000, 1999, 1999, 2001, 2001, 2001, 2001};
const std::vector<std::pair<PaperNode, PaperNode>> kToyEdges = {
    {0, 1}, {0, 2},         // fp -> refs
    {3, 0},                 // citer, fp only
    {4, 0}, {4, 1},         // citer, fp + 1 ref
    {5, 0}, {5, 1}, {5, 2}, // citer, fp + both refs
    {6, 2},                 // cites a ref but not fp
};

struct RandomGraph {
    std::vector<int32_t> years;
    std::vector<std::pair<PaperNode, PaperNode>> edges;
    std::map<PaperNode, int32_t> year_map;
};

RandomGraph random_graph(uint64_t seed, uint32_t n, uint32_t n_edges) {
    Rng rng(seed);
    RandomGraph g;
    g.years.resize(n);
    for (uint32_t i = 0; i < n; ++i) {
        g.years[i] = 1990 + int32_t(rng.next_below(25));
        g.year_map[i] = g.years[i];
    }
    for (uint32_t e = 0; e < n_edges; ++e) {
        PaperNode a = PaperNode(rng.next_below(n)), b = PaperNode(rng.next_below(n));
        if (a != b) g.edges.push_back({a, b});
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    return g;
}

} // namespace

TEST_SUITE("disruption") {
    TEST_CASE("pure-i: citers touch no references") {
        Corpus c = tiny_corpus({2000, 2001, 2001, 2001}, {{1, 0}, {2, 0}, {3, 0}});
        CitationGraph g = CitationGraph::build(c);
        auto cl = classify_citers(g, 0, {5, 5, SubThresholdPolicy::ReclassifyToI});
        CHECK(cl.n_i == 3);
        CHECK(cl.n_j == 0);
        CHECK(cl.n_k == 0);
        CHECK(di_l(g, 0, {5, 5, SubThresholdPolicy::ReclassifyToI}).di == doctest::Approx(1.0));
    }

    TEST_CASE("pure-j: all citers cite fp and >= l references") {
        std::vector<int32_t> years = {2000, 1999, 2001, 2001, 2001, 2001};
        std::vector<std::pair<PaperNode, PaperNode>> edges = {{0, 1}};
        for (PaperNode q = 2; q <= 5; ++q) {
            edges.push_back({q, 0});
            edges.push_back({q, 1});
        }
        CitationGraph g = CitationGraph::build(tiny_corpus(years, edges));
        auto s = di_l(g, 0, {1, 5, SubThresholdPolicy::ReclassifyToI});
        CHECK(s.counts.n_i == 0);
        CHECK(s.counts.n_j == 4);
        CHECK(s.counts.n_k == 0);
        CHECK(s.di == doctest::Approx(-1.0));
    }

    TEST_CASE("toy graph matches exhaustive enumeration at l=1 and l=2") {
        CitationGraph g = CitationGraph::build(tiny_corpus(kToyYears, kToyEdges));
        {
            auto cl = classify_citers(g, 0, {1, 5, SubThresholdPolicy::ReclassifyToI});
            auto expect = oracle::classify(kToyEdges, {{0, 2000}, {1, 1999}, {2, 1999},
                                                       {3, 2001}, {4, 2001}, {5, 2001}, {6, 2001}},
                                           0, 1, 5);
            CHECK(cl.n_i == expect.n_i);
            CHECK(cl.n_j == expect.n_j);
            CHECK(cl.n_k == expect.n_k);
            CHECK(cl.n_i == 1);
            CHECK(cl.n_j == 2);
            CHECK(cl.n_k == 1);
        }
        {
            // sub-threshold citer (one shared reference) folds into n_i
            auto s = di_l(g, 0, {2, 5, SubThresholdPolicy::ReclassifyToI});
            CHECK(s.counts.n_i == 2);
            CHECK(s.counts.n_j == 1);
            CHECK(s.counts.n_k == 1);
            CHECK(s.di == doctest::Approx(0.25)); // (2-1)/4
        }
        {
            // discard policy drops it from both classes
            DiDiagnostics diag;
            auto batch = di_batch(g, {0}, {2, 5, SubThresholdPolicy::Discard}, &diag);
            CHECK(batch[0].counts.n_i == 1);
            CHECK(batch[0].counts.n_j == 1);
            CHECK(batch[0].counts.n_k == 1);
            CHECK(diag.sub_threshold_discarded == 1);
        }
    }

    TEST_CASE("degenerate: no citers and no reference citers") {
        Corpus c = tiny_corpus({2000, 1999}, {{0, 1}});
        CitationGraph g = CitationGraph::build(c);
        auto s = di_l(g, 0, {5, 5, SubThresholdPolicy::ReclassifyToI});
        CHECK_FALSE(s.defined);
    }

    TEST_CASE("errors: bad l, missing year") {
        CitationGraph g = CitationGraph::build(tiny_corpus({2000}, {}));
        CHECK_THROWS_AS(classify_citers(g, 0, {0, 5, SubThresholdPolicy::ReclassifyToI}),
                        ConfigError);
        Corpus c = tiny_corpus({2000}, {});
        c.node_ids.push_back("ext");
        c.external_year.push_back(kNoYear);
        CitationGraph g2 = CitationGraph::build(c);
        CHECK_THROWS_AS(di_l(g2, 1, {5, 5, SubThresholdPolicy::ReclassifyToI}), DataError);
        CHECK_THROWS_AS(di_batch(g2, {1}, {5, 5, SubThresholdPolicy::ReclassifyToI}), DataError);
    }

    TEST_CASE("random graphs match the set-algebra oracle") {
        for (uint64_t seed : {1, 2, 3, 4, 5}) {
            RandomGraph rg = random_graph(seed, 120, 700);
            CitationGraph g = CitationGraph::build(tiny_corpus(rg.years, rg.edges));
            for (int l : {1, 3, 5}) {
                for (int32_t w : {3, 5, -1}) {
                    DiParams params{l, w, SubThresholdPolicy::ReclassifyToI};
                    for (PaperNode fp = 0; fp < 120; fp += 7) {
                        auto got = classify_citers(g, fp, params);
                        auto want = oracle::classify(rg.edges, rg.year_map, fp, l, w);
                        REQUIRE(got.n_i == want.n_i);
                        REQUIRE(got.n_j == want.n_j);
                        REQUIRE(got.n_k == want.n_k);
                    }
                }
            }
        }
    }

    TEST_CASE("bounds and monotonicity in l") {
        RandomGraph rg = random_graph(42, 150, 1200);
        CitationGraph g = CitationGraph::build(tiny_corpus(rg.years, rg.edges));
        std::vector<PaperNode> all;
        for (PaperNode p = 0; p < 150; ++p) all.push_back(p);
        std::vector<std::vector<DisruptionScore>> by_l;
        for (int l : {1, 2, 3, 5})
            by_l.push_back(di_batch(g, all, {l, 5, SubThresholdPolicy::ReclassifyToI}));
        for (size_t i = 0; i < all.size(); ++i) {
            for (size_t li = 0; li < by_l.size(); ++li) {
                const auto& s = by_l[li][i];
                if (s.defined) {
                    CHECK(s.di >= -1.0);
                    CHECK(s.di <= 1.0);
                }
                if (li == 0) continue;
                const auto& prev = by_l[li - 1][i];
                CHECK(s.counts.n_j <= prev.counts.n_j);
                CHECK(s.counts.n_i >= prev.counts.n_i);
                CHECK(s.counts.n_i + s.counts.n_j == prev.counts.n_i + prev.counts.n_j);
                if (s.defined) CHECK(s.di >= prev.di - 1e-12);
            }
        }
    }

    TEST_CASE("window monotonicity of counts") {
        RandomGraph rg = random_graph(43, 100, 800);
        CitationGraph g = CitationGraph::build(tiny_corpus(rg.years, rg.edges));
        std::vector<PaperNode> all;
        for (PaperNode p = 0; p < 100; ++p) all.push_back(p);
        auto w3 = di_batch(g, all, {1, 3, SubThresholdPolicy::ReclassifyToI});
        auto w5 = di_batch(g, all, {1, 5, SubThresholdPolicy::ReclassifyToI});
        auto winf = di_batch(g, all, {1, -1, SubThresholdPolicy::ReclassifyToI});
        for (size_t i = 0; i < all.size(); ++i) {
            CHECK(w3[i].counts.n_i + w3[i].counts.n_j <= w5[i].counts.n_i + w5[i].counts.n_j);
            CHECK(w5[i].counts.n_i + w5[i].counts.n_j <= winf[i].counts.n_i + winf[i].counts.n_j);
            CHECK(w3[i].counts.n_k <= w5[i].counts.n_k);
            CHECK(w5[i].counts.n_k <= winf[i].counts.n_k);
        }
    }

    TEST_CASE("batch equals single evaluation and the serial reference") {
        RandomGraph rg = random_graph(44, 90, 600);
        CitationGraph g = CitationGraph::build(tiny_corpus(rg.years, rg.edges));
        std::vector<PaperNode> all;
        for (PaperNode p = 0; p < 90; ++p) all.push_back(p);
        DiParams params{3, 5, SubThresholdPolicy::ReclassifyToI};
        auto par = di_batch(g, all, params);
        auto ser = di_batch_serial(g, all, params);
        REQUIRE(par.size() == ser.size());
        for (size_t i = 0; i < par.size(); ++i) {
            CHECK(par[i].counts.n_i == ser[i].counts.n_i);
            CHECK(par[i].counts.n_j == ser[i].counts.n_j);
            CHECK(par[i].counts.n_k == ser[i].counts.n_k);
            CHECK(par[i].di == ser[i].di); // bit-identical
            auto single = di_l(g, all[i], params);
            CHECK(single.di == par[i].di);
            CHECK(single.defined == par[i].defined);
        }
    }
}

#include "doctest.h"

#include "synergylab/citation_graph.hpp"
#include "synergylab/error.hpp"
#include "synergylab/rng.hpp"

#include "test_util.hpp"

#include <map>
#include <set>

using namespace synergylab;

namespace {

// direct in-memory corpus: n papers, given years, given edges
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

} // namespace

TEST_SUITE("citation_graph") {
    TEST_CASE("single edge builds both directions") {
        Corpus c = tiny_corpus({2000, 1999}, {{0, 1}});
        CitationGraph g = CitationGraph::build(c);
        CHECK(g.n_edges() == 1);
        REQUIRE(g.references(0).size() == 1);
        CHECK(g.references(0)[0] == 1);
        REQUIRE(g.citers(1).size() == 1);
        CHECK(g.citers(1)[0] == 0);
        CHECK(g.references(1).empty());
        CHECK(g.citers(0).empty());
    }

    TEST_CASE("self-loops are dropped and counted") {
        Corpus c = tiny_corpus({2000, 1999}, {{0, 0}, {0, 1}});
        CitationGraph g = CitationGraph::build(c);
        CHECK(g.n_edges() == 1);
        CHECK(g.self_loops_dropped() == 1);
    }

    TEST_CASE("random graph: forward and backward are exact transposes") {
        Rng rng(2024);
        const uint32_t n = 200;
        std::vector<int32_t> years(n);
        for (auto& y : years) y = 1980 + int32_t(rng.next_below(40));
        std::set<std::pair<PaperNode, PaperNode>> edge_set;
        for (int e = 0; e < 900; ++e) {
            PaperNode a = PaperNode(rng.next_below(n)), b = PaperNode(rng.next_below(n));
            if (a != b) edge_set.insert({a, b});
        }
        std::vector<std::pair<PaperNode, PaperNode>> edges(edge_set.begin(), edge_set.end());
        CitationGraph g = CitationGraph::build(tiny_corpus(years, edges));
        CHECK(g.n_edges() == edges.size());

        // edge-by-edge: (a, b) in fwd iff (b, a) in bwd, both sorted
        std::set<std::pair<PaperNode, PaperNode>> fwd_edges, bwd_edges;
        for (PaperNode p = 0; p < n; ++p) {
            PaperNode prev = 0;
            bool first = true;
            for (PaperNode q : g.references(p)) {
                CHECK((first || q > prev)); // sorted ascending, no dupes
                prev = q;
                first = false;
                fwd_edges.insert({p, q});
            }
            for (PaperNode q : g.citers(p)) bwd_edges.insert({q, p});
        }
        CHECK(fwd_edges == edge_set);
        CHECK(bwd_edges == edge_set);
    }

    TEST_CASE("window boundaries are inclusive at t and t+w") {
        // citers of paper 0 (year 2000) at years 2000, 2005, 2006, 1999
        Corpus c = tiny_corpus({2000, 2000, 2005, 2006, 1999},
                               {{1, 0}, {2, 0}, {3, 0}, {4, 0}});
        CitationGraph g = CitationGraph::build(c);
        CitationGraph::WindowStats stats;
        auto w5 = g.citers_in_window(0, 5, &stats);
        CHECK(w5 == std::vector<PaperNode>{1, 2});
        CHECK(stats.excluded_before_focal == 1);

        auto w6 = g.citers_in_window(0, 6);
        CHECK(w6 == std::vector<PaperNode>{1, 2, 3});
        auto all = g.citers_in_window(0, -1);
        CHECK(all == std::vector<PaperNode>{1, 2, 3});
        CHECK(all.size() <= g.in_degree(0));
    }

    TEST_CASE("citers without a year are excluded and counted") {
        Corpus c = tiny_corpus({2000}, {});
        c.node_ids.push_back("ext");
        c.external_year.push_back(kNoYear);
        c.citations = {{1, 0}};
        CitationGraph g = CitationGraph::build(c);
        CitationGraph::WindowStats stats;
        CHECK(g.citers_in_window(0, 5, &stats).empty());
        CHECK(stats.excluded_no_year == 1);
        CHECK_THROWS_AS(g.citers_in_window(1, 5), DataError);
    }

    TEST_CASE("window monotonicity") {
        Rng rng(7);
        const uint32_t n = 80;
        std::vector<int32_t> years(n);
        for (auto& y : years) y = 1990 + int32_t(rng.next_below(25));
        std::vector<std::pair<PaperNode, PaperNode>> edges;
        for (int e = 0; e < 400; ++e) {
            PaperNode a = PaperNode(rng.next_below(n)), b = PaperNode(rng.next_below(n));
            if (a != b) edges.push_back({a, b});
        }
        CitationGraph g = CitationGraph::build(tiny_corpus(years, edges));
        for (PaperNode p = 0; p < n; ++p) {
            auto w1 = g.citers_in_window(p, 3);
            auto w2 = g.citers_in_window(p, 5);
            CHECK(std::includes(w2.begin(), w2.end(), w1.begin(), w1.end()));
        }
    }

    TEST_CASE("unknown node throws") {
        CitationGraph g = CitationGraph::build(tiny_corpus({2000}, {}));
        CHECK_THROWS_AS(g.references(5), DataError);
    }

    TEST_CASE("binary cache round-trips") {
        Rng rng(11);
        std::vector<int32_t> years(50);
        for (auto& y : years) y = 1990 + int32_t(rng.next_below(20));
        std::vector<std::pair<PaperNode, PaperNode>> edges;
        for (int e = 0; e < 200; ++e) {
            PaperNode a = PaperNode(rng.next_below(50)), b = PaperNode(rng.next_below(50));
            edges.push_back({a, b});
        }
        CitationGraph g = CitationGraph::build(tiny_corpus(years, edges));
        testutil::TempDir dir;
        g.save_cache(dir.file("graph.bin"));
        CitationGraph h = CitationGraph::load_cache(dir.file("graph.bin"));
        REQUIRE(h.n_nodes() == g.n_nodes());
        CHECK(h.n_edges() == g.n_edges());
        CHECK(h.self_loops_dropped() == g.self_loops_dropped());
        for (PaperNode p = 0; p < g.n_nodes(); ++p) {
            CHECK(std::vector<PaperNode>(h.references(p).begin(), h.references(p).end()) ==
                  std::vector<PaperNode>(g.references(p).begin(), g.references(p).end()));
            CHECK(h.year_of(p) == g.year_of(p));
        }
        testutil::write_file(dir.file("bad.bin"), "NOPE");
        CHECK_THROWS_AS(CitationGraph::load_cache(dir.file("bad.bin")), DataError);
    }
}

#include "doctest.h"

#include "synergylab/citation_graph.hpp"
#include "synergylab/disruption.hpp"
#include "synergylab/error.hpp"
#include "synergylab/synergy.hpp"
#include "synergylab/synthlab.hpp"

#include "test_util.hpp"

#include <cmath>
#include <map>

using namespace synergylab;

TEST_SUITE("synthlab") {
    TEST_CASE("team sizes follow the planted distribution") {
        Rng rng(1);
        auto sizes = gen_team_sizes(1.5, 0.2, 30, 1000000, rng);
        std::map<uint32_t, uint64_t> counts;
        for (uint32_t g : sizes) ++counts[g];
        GroupSizeDistribution want = planted_distribution(1.5, 0.2, 30);
        // total-variation distance between empirical p_g and the plant
        std::vector<std::pair<uint32_t, uint64_t>> empirical(counts.begin(), counts.end());
        GroupSizeDistribution got = distribution_from_counts(empirical);
        double tv = 0;
        for (uint32_t g = 1; g <= 30; ++g) tv += std::fabs(got.p_of(g) - want.p_of(g));
        CHECK(tv / 2.0 < 0.01);
    }

    TEST_CASE("large gamma concentrates on solo work") {
        Rng rng(2);
        auto sizes = gen_team_sizes(1.0, 8.0, 20, 20000, rng);
        size_t solos = 0;
        for (uint32_t g : sizes) solos += g == 1;
        CHECK(double(solos) / double(sizes.size()) > 0.999);
    }

    TEST_CASE("different plants give different fits") {
        GroupSizeDistribution a = planted_distribution(1.8, 0.1, 30);
        GroupSizeDistribution b = planted_distribution(0.3, 0.4, 30);
        SynergyFit fa = fit_synergy(empirical_synergy(a));
        SynergyFit fb = fit_synergy(empirical_synergy(b));
        CHECK(std::fabs(fa.beta - fb.beta) > 1.0);
        CHECK(fa.gamma < fb.gamma);
    }

    TEST_CASE("unbounded support is rejected") {
        Rng rng(3);
        CHECK_THROWS_AS(gen_team_sizes(1.0, 0.0, 0, 10, rng), ConfigError);
        CHECK_THROWS_AS(gen_team_sizes(1.0, 0.5, 0, 10, rng), ConfigError);
    }

    TEST_CASE("planted citation structure reproduces DI exactly") {
        std::vector<std::array<uint32_t, 3>> plants = {
            {2, 1, 1}, {0, 4, 0}, {0, 0, 0}, {3, 0, 0}, {5, 2, 7}, {0, 0, 9}};
        DiPlantCorpus pc = gen_citation_structure(plants, 2, 5);
        CitationGraph g = CitationGraph::build(pc.corpus);
        auto scores = di_batch(g, pc.focal_papers, DiParams{2, 5, SubThresholdPolicy::ReclassifyToI});
        REQUIRE(scores.size() == plants.size());
        for (size_t i = 0; i < plants.size(); ++i) {
            CHECK(scores[i].counts.n_i == pc.plants[i].n_i);
            CHECK(scores[i].counts.n_j == pc.plants[i].n_j);
            CHECK(scores[i].counts.n_k == pc.plants[i].n_k);
            CHECK(scores[i].defined == pc.plants[i].defined);
            if (scores[i].defined) CHECK(scores[i].di == pc.plants[i].di); // bit-exact
        }
        // (2,1,1) -> 0.25 and all-j -> -1 as stated plants
        CHECK(pc.plants[0].di == 0.25);
        CHECK(pc.plants[1].di == -1.0);
        CHECK_FALSE(pc.plants[2].defined);
    }

    TEST_CASE("corpus generation is byte-identical for the same spec") {
        testutil::TempDir a, b;
        CorpusSpec spec;
        spec.seed = 31337;
        spec.n_papers = 500;
        spec.n_authors = 100;
        gen_corpus(spec, a.path);
        gen_corpus(spec, b.path);
        for (const char* f : {"papers.csv", "authors.csv", "authorships.csv", "citations.csv",
                              "ledger.json"})
            CHECK(testutil::slurp(a.file(f)) == testutil::slurp(b.file(f)));
        CorpusSpec other = spec;
        other.seed = 31338;
        testutil::TempDir c2;
        gen_corpus(other, c2.path);
        CHECK(testutil::slurp(a.file("citations.csv")) != testutil::slurp(c2.file("citations.csv")));
    }

    TEST_CASE("generated corpus loads cleanly and the ledger matches") {
        testutil::TempDir dir;
        CorpusSpec spec;
        spec.seed = 4242;
        spec.n_papers = 800;
        spec.n_authors = 150;
        gen_corpus(spec, dir.path);
        Corpus c = load_corpus({dir.file("papers.csv"), dir.file("authors.csv"),
                                dir.file("authorships.csv"), dir.file("citations.csv")});
        CHECK(c.n_papers == 800);
        CHECK(c.authors.size() == 150);
        CHECK(c.stats.papers_malformed == 0);
        auto ledger = testutil::slurp(dir.file("ledger.json"));
        CHECK(ledger.find("\"n_papers\": 800") != std::string::npos);
        CHECK(ledger.find("elite_authors") != std::string::npos);
    }
}

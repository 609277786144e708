#include "doctest.h"

#include "synergylab/corpus.hpp"
#include "synergylab/error.hpp"
#include "synergylab/synthlab.hpp"

#include "test_util.hpp"

#include <set>

using namespace synergylab;

namespace {

const char* kPapers =
    "paper_id,year,top_field,sub_fields,doc_type,atypicality_z\n"
    "p1,2000,Physics,optics;lasers,journal_article,0.5\n"
    "p2,2001,Biology,,conference_paper,\n"
    "p3,2002,Physics,,journal_article,-1.25\n";
const char* kAuthors =
    "author_id,gender_label,gender_probability\n"
    "a1,male,0.9\n"
    "a2,unknown,\n";
const char* kAuthorships =
    "paper_id,author_id,position_index\n"
    "p1,a1,0\n"
    "p1,a2,1\n"
    "p2,a2,0\n"
    "p3,a1,0\n";
const char* kCitations = "citing_id,cited_id\np2,p1\n";

} // namespace

TEST_SUITE("corpus") {
    TEST_CASE("identity ingestion counts") {
        testutil::TempDir dir;
        Corpus c = testutil::make_corpus(dir, kPapers, kAuthors, kAuthorships, kCitations);
        CHECK(c.n_papers == 3);
        CHECK(c.authors.size() == 2);
        CHECK(c.citations.size() == 1);
        CHECK(c.stats.papers_malformed == 0);
        CHECK(c.papers[0].team_size() == 2);
        CHECK(c.papers[0].year == 2000);
        CHECK(c.fields.name(c.papers[0].top_field) == "Physics");
        CHECK(c.papers[0].atypicality_z == 0.5);
        CHECK_FALSE(c.papers[1].has_atypicality());
        CHECK(c.subfield_names.size() == 2);
    }

    TEST_CASE("duplicate citation rows are deduplicated and counted") {
        testutil::TempDir dir;
        Corpus c = testutil::make_corpus(dir, kPapers, kAuthors, kAuthorships,
                                         "citing_id,cited_id\np2,p1\np2,p1\np3,p1\n");
        CHECK(c.citations.size() == 2);
        CHECK(c.stats.citations_duplicate == 1);
    }

    TEST_CASE("authorship referencing an unknown author is a hard error") {
        testutil::TempDir dir;
        CHECK_THROWS_WITH_AS(
            testutil::make_corpus(dir, kPapers, kAuthors,
                                  "paper_id,author_id,position_index\np1,aX,0\n", kCitations),
            doctest::Contains("unknown author 'aX'"), DataError);
    }

    TEST_CASE("missing required column is a hard error") {
        testutil::TempDir dir;
        CHECK_THROWS_WITH_AS(
            testutil::make_corpus(dir, "paper_id,top_field\np1,Physics\n", kAuthors, kAuthorships,
                                  kCitations),
            doctest::Contains("missing required column 'year'"), DataError);
    }

    TEST_CASE("dangling citation endpoints become external nodes with years when known") {
        testutil::TempDir dir;
        // p0 is outside the corpus year range; pX was never declared
        Corpus c = testutil::make_corpus(
            dir,
            "paper_id,year,top_field,sub_fields,doc_type,atypicality_z\n"
            "p0,1870,Physics,,journal_article,\n"
            "p1,2000,Physics,,journal_article,\n",
            kAuthors, "paper_id,author_id,position_index\np1,a1,0\n",
            "citing_id,cited_id\np1,p0\npX,p1\n");
        CHECK(c.n_papers == 1);
        CHECK(c.n_nodes() == 3);
        CHECK(c.stats.external_nodes == 2);
        // year of the out-of-range paper is retained for window queries
        bool found_dated_external = false, found_undated_external = false;
        for (uint32_t n = c.n_papers; n < c.n_nodes(); ++n) {
            if (c.node_ids[n] == "p0") found_dated_external = c.year_of(n) == 1870;
            if (c.node_ids[n] == "pX") found_undated_external = c.year_of(n) == kNoYear;
        }
        CHECK(found_dated_external);
        CHECK(found_undated_external);
    }

    TEST_CASE("malformed rows are skipped and counted") {
        testutil::TempDir dir;
        Corpus c = testutil::make_corpus(
            dir,
            "paper_id,year,top_field,sub_fields,doc_type,atypicality_z\n"
            "p1,2000,Physics,,journal_article,\n"
            "p2,not_a_year,Physics,,journal_article,\n"
            "p3,2000,NotAField,,journal_article,\n",
            kAuthors, "paper_id,author_id,position_index\np1,a1,0\n", "citing_id,cited_id\np1,p1\n");
        CHECK(c.n_papers == 1);
        CHECK(c.stats.papers_malformed == 2);
    }

    TEST_CASE("gender label without probability is demoted, not dropped") {
        testutil::TempDir dir;
        Corpus c = testutil::make_corpus(dir, kPapers,
                                         "author_id,gender_label,gender_probability\n"
                                         "a1,male,\n"
                                         "a2,female,1.5\n",
                                         kAuthorships, kCitations);
        CHECK(c.stats.gender_demoted == 2);
        CHECK(c.authors[0].gender == Gender::Unknown);
        CHECK(c.authors[1].gender == Gender::Unknown);
    }

    TEST_CASE("filter_complete excludes papers with an unknown-gender author") {
        testutil::TempDir dir;
        Corpus c = testutil::make_corpus(dir, kPapers, kAuthors, kAuthorships, kCitations);
        Corpus f = filter_complete(c, {Indicator::Gender});
        // p1 has a2 (unknown), p2 has a2; only p3 (a1, male 0.9) survives
        CHECK(f.n_papers == 1);
        CHECK(f.node_ids[0] == "p3");
        // the citation p2 -> p1 keeps both endpoints alive as externals
        CHECK(f.citations.size() == 1);
        CHECK(f.n_nodes() == 3);
        CHECK(f.year_of(f.citations[0].first) == 2001);
    }

    TEST_CASE("filter_complete with empty requirement set is the identity") {
        testutil::TempDir dir;
        Corpus c = testutil::make_corpus(dir, kPapers, kAuthors, kAuthorships, kCitations);
        Corpus f = filter_complete(c, {});
        CHECK(f.n_papers == c.n_papers);
        CHECK(f.node_ids == c.node_ids);
        CHECK(f.citations == c.citations);
    }

    TEST_CASE("filter_complete is idempotent") {
        testutil::TempDir dir;
        Corpus c = testutil::make_corpus(dir, kPapers, kAuthors, kAuthorships, kCitations);
        Corpus once = filter_complete(c, {Indicator::Gender});
        Corpus twice = filter_complete(once, {Indicator::Gender});
        CHECK(once.n_papers == twice.n_papers);
        CHECK(once.node_ids == twice.node_ids);
        CHECK(once.citations == twice.citations);
    }

    TEST_CASE("di-computable filter requires the mask") {
        testutil::TempDir dir;
        Corpus c = testutil::make_corpus(dir, kPapers, kAuthors, kAuthorships, kCitations);
        CHECK_THROWS_AS(filter_complete(c, {Indicator::DiComputable}), ConfigError);
        std::vector<uint8_t> defined = {1, 0, 1};
        FilterOptions opts;
        opts.di_defined = &defined;
        Corpus f = filter_complete(c, {Indicator::DiComputable}, opts);
        CHECK(f.n_papers == 2);
    }

    TEST_CASE("slice semantics, commutativity and partition") {
        testutil::TempDir dir;
        Corpus c = testutil::make_corpus(dir, kPapers, kAuthors, kAuthorships, kCitations);
        CorpusView all = view_all(c);
        CHECK(slice(all, std::string("Physics"), std::nullopt).size() == 2);
        CHECK_THROWS_AS(slice(all, std::string("Nonsense"), std::nullopt), DataError);

        auto ab = slice(slice(all, std::string("Physics"), std::nullopt), std::nullopt,
                        std::make_pair(2001, 2002));
        auto ba = slice(slice(all, std::nullopt, std::make_pair(2001, 2002)),
                        std::string("Physics"), std::nullopt);
        CHECK(ab.members == ba.members);

        size_t total = 0;
        for (int32_t y = 2000; y <= 2002; ++y)
            total += slice(all, std::nullopt, std::make_pair(y, y)).size();
        CHECK(total == all.size());

        CHECK_THROWS_AS(slice(all, std::nullopt, std::make_pair(2002, 2000)), DataError);
    }

    TEST_CASE("interning is a bijection: export reproduces original ids") {
        testutil::TempDir src, exported;
        CorpusSpec spec;
        spec.seed = 99;
        spec.n_papers = 400;
        spec.n_authors = 80;
        gen_corpus(spec, src.path);
        CorpusPaths paths{src.file("papers.csv"), src.file("authors.csv"),
                          src.file("authorships.csv"), src.file("citations.csv")};
        Corpus c = load_corpus(paths);
        export_corpus(c, exported.path);
        CorpusPaths paths2{exported.file("papers.csv"), exported.file("authors.csv"),
                           exported.file("authorships.csv"), exported.file("citations.csv")};
        Corpus c2 = load_corpus(paths2);
        CHECK(c.node_ids == c2.node_ids);
        CHECK(c.author_ids == c2.author_ids);
        CHECK(c.citations == c2.citations);
        CHECK(c.authorship_authors == c2.authorship_authors);
        REQUIRE(c.n_papers == c2.n_papers);
        for (PaperNode p = 0; p < c.n_papers; ++p) {
            CHECK(c.papers[p].year == c2.papers[p].year);
            CHECK(c.papers[p].top_field == c2.papers[p].top_field);
            CHECK(c.papers[p].atypicality_z == doctest::Approx(c2.papers[p].atypicality_z));
        }
    }

    TEST_CASE("schema file renames columns") {
        testutil::TempDir dir;
        testutil::write_file(dir.file("schema.json"),
                             R"({"papers": {"paper_id": "id", "year": "yr"}})");
        testutil::write_file(dir.file("papers.csv"),
                             "id,yr,top_field,doc_type\nq1,1999,Art,book\n");
        testutil::write_file(dir.file("authors.csv"), kAuthors);
        testutil::write_file(dir.file("authorships.csv"),
                             "paper_id,author_id,position_index\nq1,a1,0\n");
        testutil::write_file(dir.file("citations.csv"), "citing_id,cited_id\n");
        Schema schema = Schema::from_json_file(dir.file("schema.json"));
        Corpus c = load_corpus({dir.file("papers.csv"), dir.file("authors.csv"),
                                dir.file("authorships.csv"), dir.file("citations.csv")},
                               schema);
        CHECK(c.n_papers == 1);
        CHECK(c.papers[0].year == 1999);
        CHECK(c.papers[0].doc_type == DocType::Book);
    }
}

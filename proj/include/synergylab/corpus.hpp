#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace synergylab {

using PaperNode = uint32_t; // dense id over retained papers + external citation endpoints
using AuthorIdx = uint32_t;

constexpr int32_t kNoYear = std::numeric_limits<int32_t>::min();

enum class Gender : uint8_t { Male, Female, Unknown };

enum class DocType : uint8_t {
    JournalArticle,
    ConferencePaper,
    Book,
    BookChapter,
    Dataset,
    Repository,
    Thesis,
    Other,
};

DocType parse_doc_type(std::string_view s);
const char* doc_type_name(DocType t);
const char* gender_name(Gender g);

struct AuthorRecord {
    Gender gender = Gender::Unknown;
    double gender_probability = std::numeric_limits<double>::quiet_NaN();
};

// The 19 top-level field codes, extendable through the schema file.
struct FieldCatalog {
    std::vector<std::string> top_fields;

    FieldCatalog();
    int index_of(std::string_view name) const;
    const std::string& name(size_t idx) const { return top_fields[idx]; }
    size_t size() const { return top_fields.size(); }
};

struct PaperRecord {
    int32_t year = kNoYear;
    uint8_t top_field = 0;
    DocType doc_type = DocType::Other;
    double atypicality_z = std::numeric_limits<double>::quiet_NaN();
    uint32_t author_begin = 0, author_end = 0;     // range into Corpus::authorship_authors
    uint32_t subfield_begin = 0, subfield_end = 0; // range into Corpus::subfield_codes

    uint32_t team_size() const { return author_end - author_begin; }
    bool has_atypicality() const;
};

struct IngestStats {
    uint64_t papers_read = 0, papers_kept = 0, papers_malformed = 0;
    uint64_t papers_without_authors = 0; // demoted to external nodes
    uint64_t authors_read = 0, authors_kept = 0, authors_malformed = 0;
    uint64_t gender_demoted = 0; // inconsistent gender columns reset to unknown
    uint64_t authorships_read = 0;
    uint64_t citations_read = 0, citations_kept = 0, citations_duplicate = 0;
    uint64_t citations_malformed = 0;
    uint64_t external_nodes = 0;

    std::string summary() const;
};

// Column-name mapping for the four input files plus delimiter choices.
// Canonical names are the defaults; a schema JSON file can rename them,
// either globally ("columns") or per file ("papers", "authorships", ...).
struct Schema {
    char delimiter = ',';
    char subfield_separator = ';';
    std::unordered_map<std::string, std::string> columns; // "canonical" or "file.canonical" -> actual

    const std::string& col(const std::string& file, const std::string& canonical) const;
    static Schema from_json_file(const std::string& path);
};

struct LoadOptions {
    int32_t year_min = 1960;
    int32_t year_max = 2020;
};

struct CorpusPaths {
    std::string papers, authors, authorships, citations;
};

// Immutable after load; shareable across threads. Node ids [0, n_papers)
// are retained papers, [n_papers, n_nodes()) are external citation
// endpoints kept so disruption-index reference sets stay complete.
struct Corpus {
    FieldCatalog fields;
    std::vector<std::string> subfield_names;

    std::vector<std::string> node_ids; // external string id per node
    uint32_t n_papers = 0;
    std::vector<PaperRecord> papers;     // size n_papers
    std::vector<int32_t> external_year;  // per external node; kNoYear when unknown

    std::vector<std::string> author_ids;
    std::vector<AuthorRecord> authors;

    std::vector<AuthorIdx> authorship_authors; // byline order, indexed by PaperRecord ranges
    std::vector<uint16_t> subfield_codes;

    std::vector<std::pair<PaperNode, PaperNode>> citations; // deduplicated (citing, cited)

    IngestStats stats;

    uint32_t n_nodes() const { return static_cast<uint32_t>(node_ids.size()); }

    int32_t year_of(PaperNode n) const {
        return n < n_papers ? papers[n].year : external_year[n - n_papers];
    }

    // Byline of a retained paper, in order.
    std::pair<const AuthorIdx*, const AuthorIdx*> byline(PaperNode p) const {
        const auto& r = papers[p];
        return {authorship_authors.data() + r.author_begin,
                authorship_authors.data() + r.author_end};
    }

    bool author_gender_valid(AuthorIdx a, double min_prob) const {
        const auto& ar = authors[a];
        return ar.gender != Gender::Unknown && ar.gender_probability >= min_prob;
    }
};

// Non-copying selection of papers; composable and commutative.
struct CorpusView {
    const Corpus* corpus = nullptr;
    std::vector<PaperNode> members; // sorted ascending

    size_t size() const { return members.size(); }
    bool empty() const { return members.empty(); }
};

CorpusView view_all(const Corpus& corpus);

// field/year filters; either may be absent. Unknown field name throws.
CorpusView slice(const CorpusView& v, const std::optional<std::string>& field,
                 std::optional<std::pair<int32_t, int32_t>> years);

Corpus load_corpus(const CorpusPaths& paths, const Schema& schema = Schema{},
                   const LoadOptions& opts = LoadOptions{});

enum class Indicator : uint8_t { Gender, TopField, Year, DiComputable };

struct FilterOptions {
    double gender_min_prob = 0.5;
    // required when Indicator::DiComputable is requested: per-paper
    // "DI defined" mask aligned with corpus.papers
    const std::vector<uint8_t>* di_defined = nullptr;
};

// Keeps only papers whose required indicators are present (for the paper
// and all its authors). Dropped papers remain visible as external nodes
// with their year so citation-network computations stay complete.
Corpus filter_complete(const Corpus& corpus, const std::vector<Indicator>& required,
                       const FilterOptions& opts = FilterOptions{});

// Writes the corpus back out in the ingestion formats with original ids.
void export_corpus(const Corpus& corpus, const std::string& dir,
                   const Schema& schema = Schema{});

} // namespace synergylab

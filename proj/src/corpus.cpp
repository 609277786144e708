#include "synergylab/corpus.hpp"

#include "synergylab/csv.hpp"
#include "synergylab/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace synergylab {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

} // namespace

DocType parse_doc_type(std::string_view s) {
    std::string key;
    for (char c : s)
        if (std::isalnum(static_cast<unsigned char>(c)))
            key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (key.rfind("journal", 0) == 0) return DocType::JournalArticle;
    if (key.rfind("conference", 0) == 0) return DocType::ConferencePaper;
    if (key == "bookchapter") return DocType::BookChapter;
    if (key == "book") return DocType::Book;
    if (key == "dataset") return DocType::Dataset;
    if (key == "repository") return DocType::Repository;
    if (key == "thesis") return DocType::Thesis;
    return DocType::Other;
}

const char* doc_type_name(DocType t) {
    switch (t) {
        case DocType::JournalArticle: return "journal_article";
        case DocType::ConferencePaper: return "conference_paper";
        case DocType::Book: return "book";
        case DocType::BookChapter: return "book_chapter";
        case DocType::Dataset: return "dataset";
        case DocType::Repository: return "repository";
        case DocType::Thesis: return "thesis";
        default: return "other";
    }
}

const char* gender_name(Gender g) {
    switch (g) {
        case Gender::Male: return "male";
        case Gender::Female: return "female";
        default: return "unknown";
    }
}

bool PaperRecord::has_atypicality() const { return !std::isnan(atypicality_z); }

FieldCatalog::FieldCatalog()
    : top_fields{"Art",
                 "Biology",
                 "Business",
                 "Chemistry",
                 "Computer science",
                 "Economics",
                 "Engineering",
                 "Environmental science",
                 "Geography",
                 "Geology",
                 "History",
                 "Materials science",
                 "Mathematics",
                 "Medicine",
                 "Philosophy",
                 "Physics",
                 "Political science",
                 "Psychology",
                 "Sociology"} {}

int FieldCatalog::index_of(std::string_view name) const {
    std::string key = lower(name);
    for (size_t i = 0; i < top_fields.size(); ++i)
        if (lower(top_fields[i]) == key) return static_cast<int>(i);
    return -1;
}

const std::string& Schema::col(const std::string& file, const std::string& canonical) const {
    auto it = columns.find(file + "." + canonical);
    if (it != columns.end()) return it->second;
    it = columns.find(canonical);
    return it == columns.end() ? canonical : it->second;
}

Schema Schema::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open schema file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("schema file " + path + ": " + e.what());
    }
    Schema s;
    if (j.contains("delimiter")) {
        std::string d = j["delimiter"].get<std::string>();
        if (d == "\\t" || d == "tab") s.delimiter = '\t';
        else if (d.size() == 1) s.delimiter = d[0];
        else throw ConfigError("schema delimiter must be a single character or 'tab'");
    }
    if (j.contains("subfield_separator")) {
        std::string d = j["subfield_separator"].get<std::string>();
        if (d.size() != 1) throw ConfigError("subfield_separator must be a single character");
        s.subfield_separator = d[0];
    }
    if (j.contains("columns"))
        for (auto& [k, v] : j["columns"].items()) s.columns[k] = v.get<std::string>();
    for (const char* file : {"papers", "authors", "authorships", "citations"})
        if (j.contains(file))
            for (auto& [k, v] : j[file].items())
                s.columns[std::string(file) + "." + k] = v.get<std::string>();
    return s;
}

std::string IngestStats::summary() const {
    std::ostringstream os;
    os << "papers " << papers_kept << "/" << papers_read
       << " (malformed " << papers_malformed << ", authorless " << papers_without_authors << "); "
       << "authors " << authors_kept << "/" << authors_read
       << " (malformed " << authors_malformed << ", gender demoted " << gender_demoted << "); "
       << "authorships " << authorships_read << "; "
       << "citations " << citations_kept << "/" << citations_read
       << " (dup " << citations_duplicate << ", malformed " << citations_malformed << "); "
       << "external nodes " << external_nodes;
    return os.str();
}

namespace {

int require_column(const CsvReader& r, const std::string& name, const std::string& file) {
    int idx = r.column(name);
    if (idx < 0) throw DataError(file + ": missing required column '" + name + "'");
    return idx;
}

struct Interner {
    std::unordered_map<std::string, uint32_t> map;
    std::vector<std::string>* names;

    uint32_t intern(std::string_view id) {
        auto it = map.find(std::string(id));
        if (it != map.end()) return it->second;
        uint32_t idx = static_cast<uint32_t>(names->size());
        names->emplace_back(id);
        map.emplace(names->back(), idx);
        return idx;
    }
    int lookup(std::string_view id) const {
        auto it = map.find(std::string(id));
        return it == map.end() ? -1 : static_cast<int>(it->second);
    }
};

} // namespace

Corpus load_corpus(const CorpusPaths& paths, const Schema& schema, const LoadOptions& opts) {
    Corpus c;
    IngestStats& st = c.stats;

    Interner paper_ids{{}, &c.node_ids};
    std::unordered_map<std::string, uint16_t> subfield_map;
    std::unordered_map<std::string, int32_t> skipped_paper_years; // malformed rows, kept for citation years

    // --- papers ---
    {
        CsvReader r(paths.papers, schema.delimiter);
        int c_id = require_column(r, schema.col("papers", "paper_id"), paths.papers);
        int c_year = require_column(r, schema.col("papers", "year"), paths.papers);
        int c_field = require_column(r, schema.col("papers", "top_field"), paths.papers);
        int c_sub = r.column(schema.col("papers", "sub_fields"));
        int c_doc = r.column(schema.col("papers", "doc_type"));
        int c_aty = r.column(schema.col("papers", "atypicality_z"));
        while (r.next()) {
            ++st.papers_read;
            const auto& f = r.fields();
            auto bad = [&](const char* why) {
                ++st.papers_malformed;
                if (st.papers_malformed <= 20)
                    std::fprintf(stderr, "[ingest] %s line %zu skipped: %s\n", paths.papers.c_str(),
                                 r.line_number(), why);
            };
            if (f.size() <= static_cast<size_t>(std::max({c_id, c_year, c_field}))) { bad("short row"); continue; }
            std::string_view id = f[c_id];
            if (id.empty()) { bad("empty paper_id"); continue; }
            int64_t year;
            try {
                year = parse_int(f[c_year], "year", r.line_number());
            } catch (const DataError&) { bad("unparseable year"); continue; }
            if (year < opts.year_min || year > opts.year_max) {
                skipped_paper_years.emplace(std::string(id), static_cast<int32_t>(year));
                bad("year outside corpus range");
                continue;
            }
            int field_idx = c.fields.index_of(f[c_field]);
            if (field_idx < 0) { bad("unknown top_field"); continue; }
            if (paper_ids.lookup(id) >= 0) { bad("duplicate paper_id"); continue; }

            PaperRecord rec;
            rec.year = static_cast<int32_t>(year);
            rec.top_field = static_cast<uint8_t>(field_idx);
            rec.doc_type = (c_doc >= 0 && static_cast<size_t>(c_doc) < f.size())
                               ? parse_doc_type(f[c_doc])
                               : DocType::Other;
            if (c_aty >= 0 && static_cast<size_t>(c_aty) < f.size() && !f[c_aty].empty())
                rec.atypicality_z = parse_double(f[c_aty], "atypicality_z", r.line_number());
            rec.subfield_begin = static_cast<uint32_t>(c.subfield_codes.size());
            if (c_sub >= 0 && static_cast<size_t>(c_sub) < f.size() && !f[c_sub].empty()) {
                std::string_view sv = f[c_sub];
                size_t start = 0;
                while (start <= sv.size()) {
                    size_t end = sv.find(schema.subfield_separator, start);
                    if (end == std::string_view::npos) end = sv.size();
                    std::string_view tok = sv.substr(start, end - start);
                    if (!tok.empty()) {
                        auto [it, inserted] =
                            subfield_map.emplace(std::string(tok), static_cast<uint16_t>(c.subfield_names.size()));
                        if (inserted) c.subfield_names.emplace_back(tok);
                        c.subfield_codes.push_back(it->second);
                    }
                    if (end == sv.size()) break;
                    start = end + 1;
                }
            }
            rec.subfield_end = static_cast<uint32_t>(c.subfield_codes.size());
            paper_ids.intern(id);
            c.papers.push_back(rec);
        }
    }
    c.n_papers = static_cast<uint32_t>(c.papers.size());
    st.papers_kept = c.n_papers;

    // --- authors ---
    Interner author_ids{{}, &c.author_ids};
    {
        CsvReader r(paths.authors, schema.delimiter);
        int c_id = require_column(r, schema.col("authors", "author_id"), paths.authors);
        int c_gender = require_column(r, schema.col("authors", "gender_label"), paths.authors);
        int c_prob = r.column(schema.col("authors", "gender_probability"));
        while (r.next()) {
            ++st.authors_read;
            const auto& f = r.fields();
            if (f.size() <= static_cast<size_t>(std::max(c_id, c_gender)) || f[c_id].empty()) {
                ++st.authors_malformed;
                continue;
            }
            if (author_ids.lookup(f[c_id]) >= 0) { ++st.authors_malformed; continue; }
            AuthorRecord rec;
            std::string g = lower(f[c_gender]);
            if (g == "male" || g == "m") rec.gender = Gender::Male;
            else if (g == "female" || g == "f") rec.gender = Gender::Female;
            else rec.gender = Gender::Unknown;
            if (rec.gender != Gender::Unknown) {
                bool ok = c_prob >= 0 && static_cast<size_t>(c_prob) < f.size() && !f[c_prob].empty();
                double p = 0;
                if (ok) {
                    try {
                        p = parse_double(f[c_prob], "gender_probability", r.line_number());
                    } catch (const DataError&) { ok = false; }
                    if (p < 0.0 || p > 1.0) ok = false;
                }
                // label without a sane probability violates the record
                // invariant; demote to unknown instead of dropping the
                // author (drops would cascade into dangling authorships)
                if (!ok) {
                    rec.gender = Gender::Unknown;
                    ++st.gender_demoted;
                } else {
                    rec.gender_probability = p;
                }
            }
            author_ids.intern(f[c_id]);
            c.authors.push_back(rec);
        }
    }
    st.authors_kept = c.authors.size();

    // --- authorships ---
    {
        struct Row { PaperNode paper; uint32_t pos; AuthorIdx author; };
        std::vector<Row> rows;
        CsvReader r(paths.authorships, schema.delimiter);
        int c_p = require_column(r, schema.col("authorships", "paper_id"), paths.authorships);
        int c_a = require_column(r, schema.col("authorships", "author_id"), paths.authorships);
        int c_pos = require_column(r, schema.col("authorships", "position_index"), paths.authorships);
        while (r.next()) {
            ++st.authorships_read;
            const auto& f = r.fields();
            if (f.size() <= static_cast<size_t>(std::max({c_p, c_a, c_pos})))
                throw DataError(paths.authorships + " line " + std::to_string(r.line_number()) +
                                ": short row");
            int p = paper_ids.lookup(f[c_p]);
            if (p < 0) {
                if (skipped_paper_years.count(std::string(f[c_p]))) continue; // paper was skipped upstream
                throw DataError(paths.authorships + " line " + std::to_string(r.line_number()) +
                                ": dangling authorship, unknown paper '" + std::string(f[c_p]) + "'");
            }
            int a = author_ids.lookup(f[c_a]);
            if (a < 0)
                throw DataError(paths.authorships + " line " + std::to_string(r.line_number()) +
                                ": dangling authorship, unknown author '" + std::string(f[c_a]) + "'");
            int64_t pos = parse_int(f[c_pos], "position_index", r.line_number());
            rows.push_back({static_cast<PaperNode>(p), static_cast<uint32_t>(pos),
                            static_cast<AuthorIdx>(a)});
        }
        std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
            return x.paper != y.paper ? x.paper < y.paper
                 : x.pos != y.pos     ? x.pos < y.pos
                                      : x.author < y.author;
        });
        c.authorship_authors.reserve(rows.size());
        size_t i = 0;
        for (PaperNode p = 0; p < c.n_papers; ++p) {
            c.papers[p].author_begin = static_cast<uint32_t>(c.authorship_authors.size());
            while (i < rows.size() && rows[i].paper == p)
                c.authorship_authors.push_back(rows[i++].author);
            c.papers[p].author_end = static_cast<uint32_t>(c.authorship_authors.size());
        }
    }

    // Papers with no authorship rows cannot satisfy the record invariant;
    // demote them to external nodes, keeping the year for window queries.
    // Citations are loaded after this, so only the intern map needs rebuilding.
    for (PaperNode p = 0; p < c.n_papers; ++p)
        if (c.papers[p].team_size() == 0) ++st.papers_without_authors;
    if (st.papers_without_authors > 0) {
        std::vector<PaperRecord> kept;
        std::vector<std::string> kept_ids, demoted_ids;
        std::vector<int32_t> demoted_years;
        kept.reserve(c.papers.size());
        for (PaperNode p = 0; p < c.n_papers; ++p) {
            if (c.papers[p].team_size() == 0) {
                demoted_ids.push_back(std::move(c.node_ids[p]));
                demoted_years.push_back(c.papers[p].year);
            } else {
                kept.push_back(c.papers[p]);
                kept_ids.push_back(std::move(c.node_ids[p]));
            }
        }
        c.node_ids = std::move(kept_ids);
        for (auto& id : demoted_ids) c.node_ids.push_back(std::move(id));
        c.external_year = std::move(demoted_years);
        c.papers = std::move(kept);
        c.n_papers = static_cast<uint32_t>(c.papers.size());
        st.papers_kept = c.n_papers;
        paper_ids.map.clear();
        for (uint32_t i2 = 0; i2 < c.node_ids.size(); ++i2) paper_ids.map[c.node_ids[i2]] = i2;
    }

    // --- citations ---
    {
        CsvReader r(paths.citations, schema.delimiter);
        int c_src = require_column(r, schema.col("citations", "citing_id"), paths.citations);
        int c_dst = require_column(r, schema.col("citations", "cited_id"), paths.citations);
        auto node_of = [&](std::string_view id) -> PaperNode {
            int n = paper_ids.lookup(id);
            if (n >= 0) return static_cast<PaperNode>(n);
            // citation endpoint outside the paper table: keep as a
            // degree-only external node (year known if the row was skipped
            // for being outside the corpus range)
            uint32_t node = paper_ids.intern(id);
            auto it = skipped_paper_years.find(std::string(id));
            c.external_year.push_back(it == skipped_paper_years.end() ? kNoYear : it->second);
            return node;
        };
        while (r.next()) {
            ++st.citations_read;
            const auto& f = r.fields();
            if (f.size() <= static_cast<size_t>(std::max(c_src, c_dst)) || f[c_src].empty() ||
                f[c_dst].empty()) {
                ++st.citations_malformed;
                continue;
            }
            c.citations.emplace_back(node_of(f[c_src]), node_of(f[c_dst]));
        }
        std::sort(c.citations.begin(), c.citations.end());
        size_t before = c.citations.size();
        c.citations.erase(std::unique(c.citations.begin(), c.citations.end()), c.citations.end());
        st.citations_duplicate = before - c.citations.size();
        st.citations_kept = c.citations.size();
    }
    st.external_nodes = c.n_nodes() - c.n_papers;
    return c;
}

CorpusView view_all(const Corpus& corpus) {
    CorpusView v;
    v.corpus = &corpus;
    v.members.resize(corpus.n_papers);
    for (PaperNode p = 0; p < corpus.n_papers; ++p) v.members[p] = p;
    return v;
}

CorpusView slice(const CorpusView& v, const std::optional<std::string>& field,
                 std::optional<std::pair<int32_t, int32_t>> years) {
    CorpusView out;
    out.corpus = v.corpus;
    int field_idx = -1;
    if (field) {
        field_idx = v.corpus->fields.index_of(*field);
        if (field_idx < 0) throw DataError("unknown field code '" + *field + "'");
    }
    if (years && years->first > years->second)
        throw DataError("invalid year range");
    for (PaperNode p : v.members) {
        const auto& rec = v.corpus->papers[p];
        if (field_idx >= 0 && rec.top_field != field_idx) continue;
        if (years && (rec.year < years->first || rec.year > years->second)) continue;
        out.members.push_back(p);
    }
    return out;
}

Corpus filter_complete(const Corpus& corpus, const std::vector<Indicator>& required,
                       const FilterOptions& opts) {
    bool need_gender = false, need_di = false;
    for (auto ind : required) {
        if (ind == Indicator::Gender) need_gender = true;
        if (ind == Indicator::DiComputable) need_di = true;
    }
    if (need_di && !opts.di_defined)
        throw ConfigError("filter_complete: DiComputable requires a DI-defined mask");
    if (need_di && opts.di_defined->size() != corpus.n_papers)
        throw ConfigError("filter_complete: DI mask size mismatch");

    std::vector<uint8_t> keep(corpus.n_papers, 1);
    for (PaperNode p = 0; p < corpus.n_papers; ++p) {
        const auto& rec = corpus.papers[p];
        if (rec.year == kNoYear) { keep[p] = 0; continue; } // Year/TopField guaranteed by loader
        if (need_gender) {
            auto [b, e] = corpus.byline(p);
            for (auto it = b; it != e; ++it)
                if (!corpus.author_gender_valid(*it, opts.gender_min_prob)) { keep[p] = 0; break; }
        }
        if (keep[p] && need_di && !(*opts.di_defined)[p]) keep[p] = 0;
    }

    Corpus out;
    out.fields = corpus.fields;
    out.subfield_names = corpus.subfield_names;
    out.author_ids = corpus.author_ids;
    out.authors = corpus.authors;

    std::vector<uint32_t> remap(corpus.n_nodes(), UINT32_MAX);
    for (PaperNode p = 0; p < corpus.n_papers; ++p) {
        if (!keep[p]) continue;
        remap[p] = static_cast<uint32_t>(out.papers.size());
        PaperRecord rec = corpus.papers[p];
        rec.author_begin = static_cast<uint32_t>(out.authorship_authors.size());
        auto [b, e] = corpus.byline(p);
        out.authorship_authors.insert(out.authorship_authors.end(), b, e);
        rec.author_end = static_cast<uint32_t>(out.authorship_authors.size());
        uint32_t sb = rec.subfield_begin, se = rec.subfield_end;
        rec.subfield_begin = static_cast<uint32_t>(out.subfield_codes.size());
        out.subfield_codes.insert(out.subfield_codes.end(), corpus.subfield_codes.begin() + sb,
                                  corpus.subfield_codes.begin() + se);
        rec.subfield_end = static_cast<uint32_t>(out.subfield_codes.size());
        out.papers.push_back(rec);
        out.node_ids.push_back(corpus.node_ids[p]);
    }
    out.n_papers = static_cast<uint32_t>(out.papers.size());

    // dropped papers and old externals survive as external nodes when a
    // citation still references them; years carried over where known
    std::vector<uint8_t> referenced(corpus.n_nodes(), 0);
    for (const auto& [src, dst] : corpus.citations) referenced[src] = referenced[dst] = 1;
    for (uint32_t n = 0; n < corpus.n_nodes(); ++n) {
        if (remap[n] != UINT32_MAX || !referenced[n]) continue;
        remap[n] = static_cast<uint32_t>(out.node_ids.size());
        out.node_ids.push_back(corpus.node_ids[n]);
        out.external_year.push_back(corpus.year_of(n));
    }

    out.citations.reserve(corpus.citations.size());
    for (const auto& [src, dst] : corpus.citations)
        out.citations.emplace_back(remap[src], remap[dst]);
    std::sort(out.citations.begin(), out.citations.end());

    out.stats = corpus.stats;
    out.stats.papers_kept = out.n_papers;
    out.stats.external_nodes = out.n_nodes() - out.n_papers;
    return out;
}

void export_corpus(const Corpus& corpus, const std::string& dir, const Schema& schema) {
    {
        CsvWriter w(dir + "/papers.csv",
                    {"paper_id", "year", "top_field", "sub_fields", "doc_type", "atypicality_z"});
        for (PaperNode p = 0; p < corpus.n_papers; ++p) {
            const auto& rec = corpus.papers[p];
            std::string subs;
            for (uint32_t i = rec.subfield_begin; i < rec.subfield_end; ++i) {
                if (!subs.empty()) subs += schema.subfield_separator;
                subs += corpus.subfield_names[corpus.subfield_codes[i]];
            }
            w.row({corpus.node_ids[p], std::to_string(rec.year), corpus.fields.name(rec.top_field),
                   subs, doc_type_name(rec.doc_type),
                   rec.has_atypicality() ? format_double(rec.atypicality_z) : ""});
        }
    }
    {
        CsvWriter w(dir + "/authors.csv", {"author_id", "gender_label", "gender_probability"});
        for (size_t a = 0; a < corpus.authors.size(); ++a) {
            const auto& rec = corpus.authors[a];
            w.row({corpus.author_ids[a], gender_name(rec.gender),
                   rec.gender == Gender::Unknown ? "" : format_double(rec.gender_probability)});
        }
    }
    {
        CsvWriter w(dir + "/authorships.csv", {"paper_id", "author_id", "position_index"});
        for (PaperNode p = 0; p < corpus.n_papers; ++p) {
            auto [b, e] = corpus.byline(p);
            for (auto it = b; it != e; ++it)
                w.row({corpus.node_ids[p], corpus.author_ids[*it],
                       std::to_string(static_cast<int>(it - b))});
        }
    }
    {
        CsvWriter w(dir + "/citations.csv", {"citing_id", "cited_id"});
        for (const auto& [src, dst] : corpus.citations)
            w.row({corpus.node_ids[src], corpus.node_ids[dst]});
    }
}

} // namespace synergylab

#include "synergylab/run_config.hpp"

#include "synergylab/csv.hpp"
#include "synergylab/error.hpp"
#include "synergylab/toml.hpp"

#include <cstdio>
#include <sstream>

namespace synergylab {

const char* const kToolVersion = "synergylab 0.1.0";

DiParams RunConfig::di_params() const {
    DiParams p;
    p.l = di_l;
    p.window = di_window;
    p.policy = di_discard_sub_threshold ? SubThresholdPolicy::Discard
                                        : SubThresholdPolicy::ReclassifyToI;
    return p;
}

FitOptions RunConfig::fit_options() const {
    FitOptions o;
    o.min_count = fit_min_count;
    o.beta_starts = beta_starts;
    o.gamma_starts = gamma_starts;
    o.tolerance = fit_tolerance;
    o.max_iterations = fit_max_iterations;
    o.target = fit_reduced_target ? FitOptions::Target::ReducedR : FitOptions::Target::ModelR;
    o.weight_by_count = fit_weight_by_count;
    return o;
}

RunConfig RunConfig::from_file(const std::string& path) {
    return from_toml(TomlTable::from_file(path));
}

RunConfig RunConfig::from_toml(const TomlTable& t) {
    RunConfig c;
    c.papers = t.get_string("input.papers", c.papers);
    c.authors = t.get_string("input.authors", c.authors);
    c.authorships = t.get_string("input.authorships", c.authorships);
    c.citations = t.get_string("input.citations", c.citations);
    c.schema_file = t.get_string("input.schema", c.schema_file);
    c.graph_cache = t.get_string("input.graph_cache", c.graph_cache);
    c.year_min = static_cast<int32_t>(t.get_int("input.year_min", c.year_min));
    c.year_max = static_cast<int32_t>(t.get_int("input.year_max", c.year_max));
    if (c.year_min > c.year_max) throw ConfigError("input.year_min exceeds input.year_max");
    c.require_indicators = t.get_string_array("input.require");
    for (const auto& ind : c.require_indicators)
        if (ind != "gender" && ind != "top_field" && ind != "year")
            throw ConfigError("input.require: unknown indicator '" + ind + "'");

    c.disciplines = t.get_string_array("slicing.disciplines");
    c.year_bin_width = static_cast<int>(t.get_int("slicing.year_bin_width", c.year_bin_width));
    if (c.year_bin_width < 0) throw ConfigError("slicing.year_bin_width must be >= 0");

    c.di_l = static_cast<int>(t.get_int("di.l", c.di_l));
    if (c.di_l < 1) throw ConfigError("di.l must be >= 1");
    c.di_window = static_cast<int>(t.get_int("di.window", c.di_window));
    c.di_discard_sub_threshold =
        t.get_bool("di.discard_sub_threshold", c.di_discard_sub_threshold);

    c.fit_min_count = static_cast<uint64_t>(t.get_int("fit.min_count", int64_t(c.fit_min_count)));
    if (t.has("fit.beta_starts")) c.beta_starts = t.get_double_array("fit.beta_starts");
    if (t.has("fit.gamma_starts")) c.gamma_starts = t.get_double_array("fit.gamma_starts");
    if (c.beta_starts.empty() || c.gamma_starts.empty())
        throw ConfigError("fit start grids must be non-empty");
    c.fit_tolerance = t.get_double("fit.tolerance", c.fit_tolerance);
    c.fit_max_iterations = static_cast<int>(t.get_int("fit.max_iterations", c.fit_max_iterations));
    c.fit_reduced_target = t.get_bool("fit.reduced_target", c.fit_reduced_target);
    c.fit_weight_by_count = t.get_bool("fit.weight_by_count", c.fit_weight_by_count);

    c.gender_min_prob = t.get_double("features.gender_min_prob", c.gender_min_prob);
    c.key_quantile = t.get_double("features.key_quantile", c.key_quantile);
    c.key_min_pool = t.get_int("features.min_pool", c.key_min_pool);
    c.roster_file = t.get_string("features.roster", c.roster_file);

    c.n_boot = static_cast<int>(t.get_int("inference.n_boot", c.n_boot));
    if (c.n_boot < 1) throw ConfigError("inference.n_boot must be >= 1");
    c.caliper_mult = t.get_double("inference.caliper_mult", c.caliper_mult);

    c.k = static_cast<int>(t.get_int("cluster.k", c.k));
    c.k_min = static_cast<int>(t.get_int("cluster.k_min", c.k_min));
    c.k_max = static_cast<int>(t.get_int("cluster.k_max", c.k_max));
    if (c.k_min < 1 || c.k_max < c.k_min) throw ConfigError("bad cluster.k_min/k_max range");

    c.seed = static_cast<uint64_t>(t.get_int("run.seed", int64_t(c.seed)));
    c.threads = static_cast<int>(t.get_int("run.threads", c.threads));
    c.output_dir = t.get_string("run.output_dir", c.output_dir);
    return c;
}

std::string RunConfig::to_toml() const {
    std::ostringstream os;
    auto arr = [](const std::vector<double>& v) {
        std::string s = "[";
        for (size_t i = 0; i < v.size(); ++i)
            s += (i ? ", " : "") + format_double(v[i]);
        return s + "]";
    };
    os << "[input]\n";
    os << "papers = " << toml_escape(papers) << "\n";
    os << "authors = " << toml_escape(authors) << "\n";
    os << "authorships = " << toml_escape(authorships) << "\n";
    os << "citations = " << toml_escape(citations) << "\n";
    if (!schema_file.empty()) os << "schema = " << toml_escape(schema_file) << "\n";
    if (!graph_cache.empty()) os << "graph_cache = " << toml_escape(graph_cache) << "\n";
    os << "year_min = " << year_min << "\n";
    os << "year_max = " << year_max << "\n";
    if (!require_indicators.empty()) {
        os << "require = [";
        for (size_t i = 0; i < require_indicators.size(); ++i)
            os << (i ? ", " : "") << toml_escape(require_indicators[i]);
        os << "]\n";
    }
    os << "\n[slicing]\n";
    if (!disciplines.empty()) {
        os << "disciplines = [";
        for (size_t i = 0; i < disciplines.size(); ++i)
            os << (i ? ", " : "") << toml_escape(disciplines[i]);
        os << "]\n";
    }
    os << "year_bin_width = " << year_bin_width << "\n";
    os << "\n[di]\n";
    os << "l = " << di_l << "\n";
    os << "window = " << di_window << "\n";
    os << "discard_sub_threshold = " << (di_discard_sub_threshold ? "true" : "false") << "\n";
    os << "\n[fit]\n";
    os << "min_count = " << fit_min_count << "\n";
    os << "beta_starts = " << arr(beta_starts) << "\n";
    os << "gamma_starts = " << arr(gamma_starts) << "\n";
    os << "tolerance = " << format_double(fit_tolerance) << "\n";
    os << "max_iterations = " << fit_max_iterations << "\n";
    os << "reduced_target = " << (fit_reduced_target ? "true" : "false") << "\n";
    os << "weight_by_count = " << (fit_weight_by_count ? "true" : "false") << "\n";
    os << "\n[features]\n";
    os << "gender_min_prob = " << format_double(gender_min_prob) << "\n";
    os << "key_quantile = " << format_double(key_quantile) << "\n";
    os << "min_pool = " << key_min_pool << "\n";
    if (!roster_file.empty()) os << "roster = " << toml_escape(roster_file) << "\n";
    os << "\n[inference]\n";
    os << "n_boot = " << n_boot << "\n";
    os << "caliper_mult = " << format_double(caliper_mult) << "\n";
    os << "\n[cluster]\n";
    os << "k = " << k << "\n";
    os << "k_min = " << k_min << "\n";
    os << "k_max = " << k_max << "\n";
    os << "\n[run]\n";
    os << "seed = " << seed << "\n";
    os << "threads = " << threads << "\n";
    os << "output_dir = " << toml_escape(output_dir) << "\n";
    return os.str();
}

uint64_t file_content_hash(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw DataError("cannot hash missing file " + path);
    uint64_t h = 14695981039346656037ULL;
    char buf[1 << 16];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0)
        for (size_t i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    std::fclose(f);
    return h;
}

} // namespace synergylab

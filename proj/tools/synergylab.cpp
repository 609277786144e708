#include "synergylab/error.hpp"
#include "synergylab/pipeline.hpp"
#include "synergylab/run_config.hpp"
#include "synergylab/synthlab.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>

using namespace synergylab;

namespace {

// exit codes: 0 ok, 2 config error, 3 data error, 4 numerical failure
int guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: config: %s\n", e.what());
        return 2;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: data: %s\n", e.what());
        return 3;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "error: numeric: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

struct CommonOpts {
    std::string config_path;
    std::string output_dir;
    std::string input_dir;
    uint64_t seed = 0;
    bool have_seed = false;
    int threads = -1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "run config (TOML)");
    cmd->add_option("--out", o.output_dir, "output directory override");
    cmd->add_option("--input-dir", o.input_dir,
                    "directory holding papers/authors/authorships/citations CSVs");
    cmd->add_option("--seed", o.seed, "root seed override")->each([&](const std::string&) {
        o.have_seed = true;
    });
    cmd->add_option("--threads", o.threads, "worker thread count (0 = library default)");
}

RunConfig make_config(const CommonOpts& o) {
    RunConfig cfg = o.config_path.empty() ? RunConfig{} : RunConfig::from_file(o.config_path);
    if (!o.input_dir.empty()) {
        cfg.papers = o.input_dir + "/papers.csv";
        cfg.authors = o.input_dir + "/authors.csv";
        cfg.authorships = o.input_dir + "/authorships.csv";
        cfg.citations = o.input_dir + "/citations.csv";
    }
    if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
    if (o.have_seed) cfg.seed = o.seed;
    if (o.threads >= 0) cfg.threads = o.threads;
    if (const char* env = std::getenv("SYNERGYLAB_THREADS"); env && o.threads < 0)
        cfg.threads = std::atoi(env);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"synergylab: disruption, collaboration synergy and team-mode analytics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    app.failure_message(CLI::FailureMessage::help);

    struct {
        CommonOpts common;
        int di_l = -1, di_window = -100;
        int k = -1;
        // synth
        uint64_t synth_papers = 20000;
        uint32_t synth_authors = 2000;
        double synth_mean_refs = 6.0;
    } opt;

    std::vector<std::pair<std::string, std::string>> subcommands = {
        {"ingest", "load and validate the corpus, build the citation graph"},
        {"di", "compute the disruption index for every paper"},
        {"hyper", "coauthorship hypergraph statistics (L_g, p_g, team sizes)"},
        {"synergy-fit", "fit R(g; alpha, beta, gamma) per slice"},
        {"features", "team composition features and key-author flags"},
        {"mediate", "mediation analysis g -> R(g) -> DI per discipline"},
        {"moderate", "moderation analysis for the six team heterogeneity measures"},
        {"psm", "propensity-matched key-author treatment effects"},
        {"cluster", "22-feature clustering into knowledge production modes"},
        {"report", "plot-data CSVs and static SVG charts"},
        {"run", "full pipeline: everything above in order"},
        {"synth", "generate a synthetic corpus with a ground-truth ledger"},
    };
    std::map<std::string, CLI::App*> cmds;
    for (const auto& [name, desc] : subcommands) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        add_common(cmd, opt.common);
        cmds[name] = cmd;
    }
    cmds["di"]->add_option("--l", opt.di_l, "co-citation threshold l (default 5)");
    cmds["di"]->add_option("--window", opt.di_window, "citation window in years, -1 = unbounded");
    cmds["cluster"]->add_option("--k", opt.k, "cluster count (default: silhouette selection)");
    cmds["synth"]->add_option("--papers", opt.synth_papers, "paper count");
    cmds["synth"]->add_option("--authors", opt.synth_authors, "author count");
    cmds["synth"]->add_option("--mean-refs", opt.synth_mean_refs, "mean references per paper");

    CLI11_PARSE(app, argc, argv);
    const std::string name = app.get_subcommands().front()->get_name();

    return guarded([&] {
        if (name == "synth") {
            CorpusSpec spec;
            if (opt.common.have_seed) spec.seed = opt.common.seed;
            spec.n_papers = opt.synth_papers;
            spec.n_authors = opt.synth_authors;
            spec.mean_refs = opt.synth_mean_refs;
            std::string dir = opt.common.output_dir.empty() ? "synth" : opt.common.output_dir;
            std::filesystem::create_directories(dir);
            gen_corpus(spec, dir);
            std::printf("synthetic corpus written to %s\n", dir.c_str());
            return;
        }
        RunConfig cfg = make_config(opt.common);
        if (opt.di_l > 0) cfg.di_l = opt.di_l;
        if (opt.di_window != -100) cfg.di_window = opt.di_window;
        if (opt.k > 0) cfg.k = opt.k;
        Pipeline pipe(cfg);
        pipe.write_run_manifest();
        if (name == "ingest") pipe.cmd_ingest();
        else if (name == "di") pipe.cmd_di();
        else if (name == "hyper") pipe.cmd_hyper();
        else if (name == "synergy-fit") pipe.cmd_synergy_fit();
        else if (name == "features") pipe.cmd_features();
        else if (name == "mediate") pipe.cmd_mediate();
        else if (name == "moderate") pipe.cmd_moderate();
        else if (name == "psm") pipe.cmd_psm();
        else if (name == "cluster") pipe.cmd_cluster();
        else if (name == "report") pipe.cmd_report();
        else if (name == "run") pipe.run_all();
    });
}

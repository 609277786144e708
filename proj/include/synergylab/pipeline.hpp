#pragma once

#include "synergylab/citation_graph.hpp"
#include "synergylab/corpus.hpp"
#include "synergylab/disruption.hpp"
#include "synergylab/modes.hpp"
#include "synergylab/run_config.hpp"
#include "synergylab/synergy.hpp"
#include "synergylab/team_features.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace synergylab {

// Orchestrates the analysis stages behind the CLI subcommands. Stages are
// computed lazily within one process and cached; every artifact write is
// deterministic (fixed iteration orders, no timestamps), so a rerun with
// the same config reproduces the output directory byte for byte.
class Pipeline {
  public:
    explicit Pipeline(RunConfig cfg);

    const RunConfig& config() const { return cfg_; }

    const Corpus& corpus();
    const CitationGraph& graph();
    const CorpusView& analysis_view(); // discipline-filtered per config
    const std::vector<DisruptionScore>& di_scores();
    const TeamFeatureTable& team_table();

    // one fit per (field, period) plus pooled variants for reporting
    struct SliceFit {
        std::string label; // "Physics|1990-1999", "Physics|*", "*|1990-1999"
        int field = -1;    // -1 = pooled across fields
        int32_t period_start = 0, period_end = 0;
        std::optional<SynergyFit> fit;
        std::optional<EmpiricalSynergy> emp;
        std::string error; // set when fitting was impossible
        size_t n_papers = 0;
    };
    const std::vector<SliceFit>& slice_fits();

    // per-paper synergy columns aligned with analysis_view(); NaN when the
    // paper's slice has no usable fit
    const std::vector<double>& paper_r();
    const std::vector<double>& paper_alpha();
    const std::vector<double>& paper_beta();
    const std::vector<double>& paper_gamma();

    // subcommands; each writes its artifacts under cfg.output_dir
    void cmd_ingest();
    void cmd_di();
    void cmd_hyper();
    void cmd_synergy_fit();
    void cmd_features();
    void cmd_mediate();
    void cmd_moderate();
    void cmd_psm();
    void cmd_cluster();
    void cmd_report();
    void run_all(); // ingest .. report, used by tests and `run`

    // config copy + tool version + input content hashes
    void write_run_manifest();

  private:
    struct Slice {
        int field;
        int32_t period_start, period_end;
    };
    std::string out(const std::string& name) const;
    std::vector<std::pair<int32_t, int32_t>> periods() const;
    void ensure_output_dir();
    const ClusterModel& cluster_model();
    const FeatureMatrix& feature_matrix();

    RunConfig cfg_;
    std::optional<Corpus> corpus_;
    std::optional<CitationGraph> graph_;
    std::optional<CorpusView> view_;
    std::optional<std::vector<DisruptionScore>> di_;
    DiDiagnostics di_diag_;
    std::optional<TeamFeatureTable> team_;
    std::optional<std::vector<SliceFit>> fits_;
    std::optional<std::vector<double>> paper_r_, paper_alpha_, paper_beta_, paper_gamma_;
    std::optional<FeatureMatrix> features_;
    std::optional<FeatureMatrix> features_z_;
    std::optional<ClusterModel> cluster_;
    std::optional<KSelection> k_selection_;
};

} // namespace synergylab

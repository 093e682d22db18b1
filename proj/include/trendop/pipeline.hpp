#ifndef TRENDOP_PIPELINE_HPP
#define TRENDOP_PIPELINE_HPP

#include "trendop/data.hpp"
#include "trendop/embed.hpp"
#include "trendop/models.hpp"
#include "trendop/operator.hpp"
#include "trendop/spectral.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace trendop::pipeline {

enum class Source { synthetic, scalar_file, field_stack };

struct AnomalyWindow {
    long start = 0; ///< first row of the climatology window
    long end = 0;   ///< one past the last row
    int cycle = 12;
    /// Also feed anomalies (not raw values) to the operator.
    bool feed_operator = false;
};

/// Everything needed to reproduce one analysis run. Serialized as JSON:
///
///     { "input":      { "source": "synthetic", "model": {...} }
///                   | { "source": "scalar", "path": ..., "time_column": 0,
///                       "value_column": 1, "header_lines": 0,
///                       "time_is_age": false, "min_time": ..., "max_time": ... }
///                   | { "source": "field", "path": ..., "sentinel": ... },
///       "preprocess": { "dt": 1, "t_start": ..., "t_end": ...,
///                       "anomaly": { "start": 0, "end": 360, "cycle": 12,
///                                    "feed_operator": false } },
///       "embedding":  { "Q": 3, "lag": 10 },
///       "operator":   { "step": 1, "knn": 7, "modes": 20,
///                       "duplicates": "error" },
///       "output":     { "dir": "trendop_out", "write_operator": false,
///                       "write_embedding": false } }
struct RunConfig {
    Source source = Source::synthetic;
    models::ModelConfig model = models::default_config(models::Kind::F);
    std::filesystem::path path;
    data::ColumnSpec columns;
    std::optional<double> sentinel;

    std::optional<double> interp_dt;
    std::optional<double> t_start;
    std::optional<double> t_end;
    std::optional<AnomalyWindow> anomaly;

    int Q = 3;
    int lag = 10;
    int step = 1;
    int knn = 7;
    int modes = 20;
    op::DuplicatePolicy duplicates = op::DuplicatePolicy::error;

    std::filesystem::path out_dir = "trendop_out";
    bool write_operator = false;
    bool write_embedding = false;

    /// Counts positive, input file present, model parameters valid.
    void validate() const;
};

nlohmann::json config_to_json(const RunConfig &cfg);
/// Relative input paths are resolved against `base_dir`.
RunConfig config_from_json(const nlohmann::json &j,
                           const std::filesystem::path &base_dir = {});
RunConfig load_config(const std::filesystem::path &path);

/// Reference parameter sets for the synthetic models and the benthic stack.
RunConfig lr04_config(const std::filesystem::path &stack_file);
RunConfig model_config(models::Kind kind);

struct Analysis {
    RunConfig config;
    TimeSeries series; ///< what the embedding sees
    TimeSeries target; ///< observations used for amplitudes and projection
    std::optional<data::GridMask> mask;
    std::optional<models::Trajectory> trajectory;
    embed::EmbeddedSeries embedded;
    op::MarkovOperator op;
    op::SpectralDecomposition dec;
    TimeSeries aligned_target; ///< target rows matching eigenvector entries
    std::vector<spectral::ModeReport> modes;
    /// Non-fatal remarks about the input (e.g. a record that had to be sorted).
    std::vector<std::string> notices;

    /// Source row of eigenvector entry 0.
    Eigen::Index offset() const { return embedded.offset(); }
    Eigen::Index length() const { return dec.right.rows(); }
    double time(Eigen::Index i) const { return embedded.time(i); }
};

/// Loads and preprocesses the input named by the config.
struct LoadedInput {
    TimeSeries series;
    TimeSeries target;
    std::optional<data::GridMask> mask;
    std::optional<models::Trajectory> trajectory;
    std::vector<std::string> notices;
};
LoadedInput load_input(const RunConfig &cfg);

/// Runs embedding, operator assembly, eigendecomposition and mode
/// classification. Errors carry the failing stage and its parameters.
Analysis analyze(const RunConfig &cfg);
Analysis analyze(const RunConfig &cfg, LoadedInput input);

/// Writes eigenvalues.tsv, modes.tsv, mode_series.tsv and
/// resolved_config.json (plus operator.tsv / embedding.tsv if asked).
std::vector<std::filesystem::path> write_analysis(const Analysis &a,
                                                  const std::filesystem::path &dir);

struct Reconstruction {
    spectral::Projection projection;
    std::vector<int> added; ///< conjugate partners added to close the set
};

/// Projects `target` (default: the aligned observations) onto the modes in
/// `indices` (0-based), closing the set under conjugation first.
Reconstruction reconstruct(const Analysis &a, std::set<int> indices,
                           const TimeSeries *target = nullptr);

/// projection.tsv with a time column; for field inputs also
/// projection_grid.tsv scattered back onto the full grid.
std::vector<std::filesystem::path> write_reconstruction(const Analysis &a,
                                                        const Reconstruction &r,
                                                        const std::filesystem::path &dir);

} // namespace trendop::pipeline

#endif

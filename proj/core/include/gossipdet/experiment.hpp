#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "gossipdet/sbm.hpp"

namespace gossipdet {

/// Network-size schedule of the form value(n) = coeff * (log n)^log_exp * n^n_exp.
/// Covers every built-in sweep: probabilities use n_exp = -1, step counts
/// n_exp = +1.
struct Schedule {
    double coeff = 1.0;
    double log_exp = 0.0;
    double n_exp = 0.0;

    double operator()(long n) const;

    bool operator==(const Schedule&) const = default;
};

enum class DetectionAlgorithm { transient_state, time_average };

/// Stable names used in result files: "alg1" (transient state) and "alg2"
/// (time average).
std::string algorithm_name(DetectionAlgorithm algorithm);
DetectionAlgorithm algorithm_from_name(const std::string& name);

/// Initial-opinion law for the regular agents.
struct InitSpec {
    enum class Kind { uniform, per_community };
    Kind kind = Kind::uniform;
    // Kind::uniform
    double low = -1.0;
    double high = 1.0;
    // Kind::per_community
    double low1 = -1.0, high1 = 0.0;
    double low2 = 0.0, high2 = 1.0;

    bool operator==(const InitSpec&) const = default;
};

struct ExperimentConfig {
    std::string name;  ///< fig2 | fig3 | karate | custom
    std::vector<long> n_values;
    double regular_fraction = 0.9;

    Schedule p_within;
    Schedule p_between;
    Schedule p_stubborn;      ///< per-block regular-stubborn link probability
    Schedule detection_step;  ///< evaluated per n and rounded (minimum 1 for alg2)

    std::vector<DetectionAlgorithm> algorithms;
    bool record_every_step = false;  ///< evaluate both detectors at every step
    long fixed_horizon = 0;          ///< horizon when record_every_step is set
    bool use_karate_graph = false;

    int graph_samples = 20;
    int trajectories_per_graph = 20;
    std::uint64_t master_seed = 0;
    InitSpec init;
};

/// The two built-in size sweeps and the karate-club study.
ExperimentConfig fig2_config();   ///< transient-state detection sweep, n up to 1e4
ExperimentConfig fig3_config();   ///< time-average detection sweep, n up to 1e3
ExperimentConfig karate_config(); ///< 400 trajectories over the fixed club graph

/// Parameters of one sweep point. Schedule values above 1 are clamped to 0.99
/// and reported in `warnings`.
struct ResolvedPoint {
    SbmSParams params;
    Eigen::VectorXd stubborn_opinions;  ///< +1 for the first half, -1 for the rest
    long detection_step = 0;
    std::vector<std::string> warnings;
};
ResolvedPoint resolve_config(const ExperimentConfig& config, long n);

struct RunRecord {
    long n = 0;
    int graph_sample = 0;
    int trajectory = 0;
    DetectionAlgorithm algorithm = DetectionAlgorithm::transient_state;
    long detection_step = 0;
    double accuracy = 0.0;  ///< NaN when the run failed
    std::string error;      ///< empty unless the run failed
};

struct RunOptions {
    int parallelism = 1;
    bool full_sweep = false;     ///< include sweep points above the desk-scale cap
    long desk_scale_cap = 2000;  ///< largest n executed without full_sweep
};

struct ExperimentResult {
    std::vector<RunRecord> records;  ///< deterministic order: (n, graph, trajectory, ...)
    std::vector<std::string> warnings;
    double wall_seconds = 0.0;
};

/// Executes the whole run grid. Per-run seeds derive from
/// (master_seed, n index, graph sample, trajectory), so the records are a pure
/// function of (config, options-independent grid) regardless of parallelism.
/// Per-run failures become NaN records, never aborts.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

struct SummaryRow {
    long n = 0;
    DetectionAlgorithm algorithm = DetectionAlgorithm::transient_state;
    int runs = 0;
    int failures = 0;
    double mean_accuracy = 0.0;
    std::vector<double> p_at_least;  ///< aligned with the thresholds argument
};

/// Empirical accuracy table per (n, algorithm), ordered by n. Failed records
/// count toward `failures` and are excluded from the statistics. Throws
/// InvalidInput on an empty record set.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records,
                                  const std::vector<double>& thresholds);

/// Mean accuracy per step for every-step experiments (one curve per
/// algorithm), ordered by (algorithm, step).
struct StepCurvePoint {
    DetectionAlgorithm algorithm;
    long step;
    double mean_accuracy;
};
std::vector<StepCurvePoint> per_step_curves(const std::vector<RunRecord>& records);

}  // namespace gossipdet

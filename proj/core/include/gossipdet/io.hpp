#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gossipdet/detect.hpp"
#include "gossipdet/experiment.hpp"
#include "gossipdet/gossip.hpp"
#include "gossipdet/oracle.hpp"
#include "gossipdet/sbm.hpp"

namespace gossipdet {

// Agent indices are 1-based in every file format; stubborn agents are the
// highest-numbered ones.

/// Graph with its stubborn opinions, as read from or written to disk.
struct GraphBundle {
    SampledGraph graph;
    Eigen::VectorXd stubborn_opinions;
};

// JSON object {n_r, n_s, edges: [[i,j],...], stubborn_opinions: [...]}.
void write_graph_json(std::ostream& out, const SampledGraph& graph,
                      const Eigen::VectorXd& stubborn_opinions);
GraphBundle read_graph_json(std::istream& in);

// Plain "i j" lines. A leading "# n_r=<a> n_s=<b>" comment preserves the
// agent split; files without it are read as all-regular with n inferred from
// the largest endpoint.
void write_edge_list(std::ostream& out, const SampledGraph& graph);
SampledGraph read_edge_list(std::istream& in);

// Trajectory CSV: header t,agent_index,value,kind with kind in {state,average}.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
Trajectory read_trajectory_csv(std::istream& in);

// Detection output {labels, split_value, cost, t_used, accuracy?}.
void write_detection_json(std::ostream& out, const DetectionResult& result, long step_used,
                          std::optional<double> accuracy_value,
                          const std::vector<std::string>& warnings = {});

// Expectation oracles as JSON matrices, for golden-file comparisons.
void write_expected_dynamics_json(std::ostream& out, const ExpectedDynamics& dynamics,
                                  const std::optional<Eigen::VectorXd>& final_opinions);

// Run records CSV: header n,graph_sample,trajectory,algorithm,detection_step,accuracy.
void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_records_csv(std::istream& in);

// Experiment summary JSON (per-n table, optional per-step curves, warnings,
// wall clock).
void write_summary_json(std::ostream& out, const ExperimentConfig& config,
                        const ExperimentResult& result, const std::vector<double>& thresholds);

// Custom experiment configuration JSON.
ExperimentConfig read_experiment_config_json(std::istream& in);
void write_experiment_config_json(std::ostream& out, const ExperimentConfig& config);

// File conveniences. Unreadable inputs raise InvalidInput, write failures
// IoError.
std::string slurp_file(const std::string& path);
void spit_file(const std::string& path, const std::string& contents);

}  // namespace gossipdet

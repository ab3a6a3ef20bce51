#pragma once

#include <optional>
#include <span>
#include <string>

#include "gossipdet/community.hpp"
#include "gossipdet/gossip.hpp"

namespace gossipdet {

/// Optimal two-cluster split of values on the line.
struct DetectionResult {
    CommunityStructure labels;  ///< label 1 is the cluster holding the smallest value
    double split_value = 0.0;   ///< threshold between the clusters on the line
    double cost = 0.0;          ///< within-cluster sum of squared deviations
};

/// Globally optimal 1-D 2-means. Sorts the values (stable in the agent index)
/// and scans all contiguous split points with prefix sums; among equal-cost
/// splits the smallest split index wins. A constant input collapses to one
/// cluster labeled 1. Throws InvalidInput on empty or non-finite input.
DetectionResult kmeans_two(std::span<const double> values);

/// Fraction of identical labels, maximized over the global label swap.
/// Always in [0.5, 1].
double accuracy(const CommunityStructure& truth, const CommunityStructure& estimate);

struct TransientDetectionOptions {
    /// When both probabilities are given, the clustering step is checked
    /// against step < n * p_within / (p_between * log n); a step outside the
    /// window produces an advisory warning, never an error.
    std::optional<double> p_within;
    std::optional<double> p_between;
    std::optional<long> step_override;
};

struct TransientDetection {
    DetectionResult result;
    long step_used = 0;
    std::optional<std::string> window_warning;
};

/// Default clustering step for transient-state detection: round(n log n),
/// n being the network size.
long default_transient_step(int network_size);

/// Clusters the opinion snapshot X(t), t = round(n log n) unless overridden.
TransientDetection detect_transient(const Trajectory& trajectory, int network_size,
                                    const TransientDetectionOptions& options = {});

/// Clusters the running state average S(T). Requires T >= 1.
DetectionResult detect_time_average(const Trajectory& trajectory, long clustering_step);

struct AdaptiveDetection {
    long chosen_step = 0;
    DetectionResult result;
    bool converged = false;
};

/// Clusters S(t) at every recorded multiple of `stride` and stops as soon as
/// the fraction of agents whose label changed since the previous check (up to
/// a global swap) is at or below `threshold`. The baseline is the recorded
/// step 0 when present, otherwise the first recorded stride multiple. When the
/// recording runs out before convergence the last check is returned with
/// converged = false.
AdaptiveDetection adaptive_time_average(const Trajectory& trajectory, double threshold,
                                        long stride);

/// Warns when the two communities start from (numerically) identical opinion
/// sums, a degenerate initialization for transient-state detection.
std::optional<std::string> initial_sum_warning(const Eigen::VectorXd& initial_opinions,
                                               const CommunityStructure& truth);

}  // namespace gossipdet

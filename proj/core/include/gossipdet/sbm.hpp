#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gossipdet/community.hpp"
#include "gossipdet/random.hpp"

namespace gossipdet {

/// Undirected edge; endpoints are 0-based agent indices with first < second.
using Edge = std::pair<int, int>;

/// Generative parameters of the two-community block model with stubborn
/// agents. Regular agents occupy indices 0..n_regular-1 (community 1 first),
/// stubborn agents follow.
struct SbmSParams {
    int n_regular = 0;
    int n_stubborn = 0;
    double p_within = 0.0;           ///< link probability inside a community
    double p_between = 0.0;          ///< link probability across communities
    Eigen::MatrixXd stubborn_links;  ///< n_regular x n_stubborn link probabilities

    int n_total() const noexcept { return n_regular + n_stubborn; }

    /// Throws InvalidInput on hard violations (counts, probabilities outside
    /// [0,1], shape mismatch). Boundary probabilities 0 and 1 are accepted for
    /// deterministic fixtures but reported as warnings.
    std::vector<std::string> validate() const;
};

/// One sampled graph over regular and stubborn agents. Immutable after
/// construction and safe to share across trajectory workers.
class SampledGraph {
public:
    SampledGraph(int n_regular, int n_stubborn, std::vector<Edge> edges);

    int n_regular() const noexcept { return n_regular_; }
    int n_stubborn() const noexcept { return n_stubborn_; }
    int n_total() const noexcept { return n_regular_ + n_stubborn_; }
    bool is_stubborn(int agent) const noexcept { return agent >= n_regular_; }

    /// Total number of edges (the normalizer of the interaction distribution).
    long edge_count() const noexcept { return static_cast<long>(edges_.size()); }

    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<int>& neighbors(int agent) const { return adjacency_.at(agent); }
    int degree(int agent) const { return static_cast<int>(adjacency_.at(agent).size()); }
    bool has_edge(int a, int b) const;

    /// Dense 0/1 adjacency; intended for small instances and tests.
    Eigen::MatrixXd dense_adjacency() const;

private:
    int n_regular_ = 0;
    int n_stubborn_ = 0;
    std::vector<Edge> edges_;                    // canonical order, first < second
    std::vector<std::vector<int>> adjacency_;    // sorted neighbor lists
};

/// Entrywise expectation of the sampled adjacency, together with the expected
/// edge count. Deterministic in the parameters.
struct AveragedGraph {
    int n_regular = 0;
    int n_stubborn = 0;
    Eigen::MatrixXd weights;          ///< n x n symmetric, zero diagonal, entries in [0,1]
    double expected_edge_count = 0.0; ///< sum of upper-triangular weights
};

/// Samples the plain two-community model over n regular agents (no stubborn
/// agents). n must be even; each within-community pair links independently
/// with p_within, each cross pair with p_between.
SampledGraph sample_sbm(int n, double p_within, double p_between, Rng& rng);

/// Samples the model with stubborn agents: the regular block as in sample_sbm
/// (odd n_regular allowed; community 1 takes the first ceil(n/2) agents), each
/// regular-stubborn pair independently from stubborn_links. Stubborn agents
/// never link to each other.
SampledGraph sample_sbm_s(const SbmSParams& params, Rng& rng);

/// Expected adjacency of sample_sbm_s under the same parameters.
AveragedGraph averaged_graph(const SbmSParams& params);

/// Per-regular-agent totals of stubborn link probability.
struct StubbornInfluence {
    Eigen::VectorXd row_sums;            ///< one entry per regular agent
    bool uniform = false;                ///< all row sums equal within 1e-12
    std::optional<double> common_value;  ///< the shared total, when uniform
};
StubbornInfluence stubborn_influence_row_sums(const SbmSParams& params);

/// Outcome of checking that the weighted stubborn influence is constant
/// within each community and differs across them.
struct BlockInfluenceCheck {
    bool holds = false;
    std::optional<double> community1_value;  ///< set when block 1 is constant
    std::optional<double> community2_value;  ///< set when block 2 is constant
    std::string violation;                   ///< empty when the check holds
};

/// Evaluates stubborn_links * stubborn_opinions and checks the two-block
/// structure at absolute tolerance 1e-12. Violations are reported, never
/// thrown.
BlockInfluenceCheck check_block_influence(const SbmSParams& params,
                                          const Eigen::VectorXd& stubborn_opinions);

/// The two-block regular-stubborn link matrix used by the built-in sweeps:
/// the first half of the stubborn agents links only to community 1 and the
/// second half only to community 2, with probability p everywhere inside the
/// blocks. Odd counts put the extra agent in the first block.
Eigen::MatrixXd block_stubborn_links(int n_regular, int n_stubborn, double p);

/// Zachary's karate club, renumbered so the 32 regular members come first and
/// the two faction leaders (original nodes 1 and 34) are the stubborn agents.
struct KarateClub {
    SampledGraph graph;
    Eigen::VectorXd stubborn_opinions;  ///< +1 for node 1, -1 for node 34
    CommunityStructure truth;           ///< faction split over the regular members
    std::vector<int> original_ids;      ///< internal index -> original 1-based node id
};
KarateClub karate_club();

}  // namespace gossipdet

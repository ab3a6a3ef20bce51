#pragma once

#include <Eigen/Core>

#include "gossipdet/community.hpp"
#include "gossipdet/gossip.hpp"
#include "gossipdet/sbm.hpp"

namespace gossipdet {

/// Expectations of the per-step update pair [Q R] of the compact form
/// X(t+1) = Q(t) X(t) + R(t) z. Rows of [E{Q} E{R}] sum to one and E{Q} is
/// symmetric; both hold within 1e-12 and are asserted by tests.
struct ExpectedDynamics {
    enum class Source { sampled_graph, averaged_graph };

    Eigen::MatrixXd expected_q;  ///< n_regular x n_regular
    Eigen::MatrixXd expected_r;  ///< n_regular x n_stubborn
    Source source = Source::sampled_graph;

    int n_regular() const noexcept { return static_cast<int>(expected_q.rows()); }
    int n_stubborn() const noexcept { return static_cast<int>(expected_r.cols()); }
};

/// Expectation over the uniform edge choice on one sampled graph.
ExpectedDynamics expected_update_matrices(const SampledGraph& graph);

/// Same assembly over the averaged graph: pair probabilities are
/// weights / expected_edge_count.
ExpectedDynamics expected_update_matrices(const AveragedGraph& averaged);

struct SolveOptions {
    /// Dense LU up to this many regular agents, fixed-point iteration beyond.
    int dense_cutoff = 2000;
    double fixed_point_residual = 1e-10;
    long max_fixed_point_iterations = 10'000'000;
};

/// Expected final opinions: the solution of (I - E{Q}) x = E{R} z.
///
/// Every regular agent must be connected, through regular agents, to at least
/// one agent with stubborn influence; otherwise the system is singular and a
/// SingularSystem error names the unreachable agents (1-based). The result is
/// a convex combination of stubborn opinions, entrywise in [min z, max z].
Eigen::VectorXd expected_final_opinions(const ExpectedDynamics& dynamics,
                                        const Eigen::VectorXd& stubborn_opinions,
                                        const SolveOptions& options = {});

/// Community opinion means and the worst in-community deviation of one state.
struct CommunityReference {
    double mean1 = 0.0;
    double mean2 = 0.0;
    double max_deviation = 0.0;  ///< max_i |x_i - mean of i's community|
};

CommunityReference community_reference(const Eigen::VectorXd& state,
                                       const CommunityStructure& truth);
CommunityReference community_reference(const Trajectory& trajectory,
                                       const CommunityStructure& truth, long step);

}  // namespace gossipdet

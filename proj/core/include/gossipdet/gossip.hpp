#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "gossipdet/random.hpp"
#include "gossipdet/sbm.hpp"

namespace gossipdet {

/// Interaction distribution of the pairwise-averaging process: one edge is
/// drawn per step, uniformly over the edge set (probability 1/edge_count each).
class InteractionDistribution {
public:
    explicit InteractionDistribution(const SampledGraph& graph);

    const std::vector<Edge>& edges() const noexcept { return edges_; }
    double edge_probability() const noexcept { return 1.0 / static_cast<double>(edges_.size()); }

    Edge sample(Rng& rng) const {
        std::uniform_int_distribution<std::size_t> pick(0, edges_.size() - 1);
        return edges_[pick(rng)];
    }

private:
    std::vector<Edge> edges_;
};

/// Opinion state of the gossip process over one graph.
///
/// The running state average S(t) = mean of the opinion vectors at steps 0..t
/// is maintained lazily: opinions are piecewise constant between updates, so
/// each agent accumulates value-times-holding-length segments (compensated
/// summation). A step costs O(1); reading the average costs O(n_regular).
class GossipState {
public:
    /// Throws InvalidInput when any entry is not finite.
    GossipState(Eigen::VectorXd initial_opinions, Eigen::VectorXd stubborn_opinions);

    int n_regular() const noexcept { return static_cast<int>(opinions_.size()); }
    int n_stubborn() const noexcept { return static_cast<int>(stubborn_.size()); }
    long step_count() const noexcept { return step_; }

    const Eigen::VectorXd& opinions() const noexcept { return opinions_; }
    const Eigen::VectorXd& stubborn_opinions() const noexcept { return stubborn_; }

    /// S(t) for the current step t.
    Eigen::VectorXd running_average() const;

    /// Applies the update of one selected edge and advances the step counter.
    /// Both endpoints regular: both move to the midpoint. One stubborn: the
    /// regular endpoint moves to the midpoint with the stubborn opinion. Both
    /// stubborn: nothing moves. The edge must belong to `graph`.
    void apply_edge(Edge edge, const SampledGraph& graph);

private:
    void apply_selected(Edge edge);
    void flush_agent(int agent) const;

    Eigen::VectorXd opinions_;
    Eigen::VectorXd stubborn_;
    long step_ = 0;

    // Lazy running-average accumulator.
    mutable Eigen::VectorXd segment_sum_;
    mutable Eigen::VectorXd segment_comp_;
    mutable std::vector<long> held_since_;

    friend Edge step(GossipState&, const InteractionDistribution&, Rng&);
};

/// Draws one edge i.i.d. from the interaction distribution, applies it, and
/// returns it.
Edge step(GossipState& state, const InteractionDistribution& distribution, Rng& rng);

/// One iteration of the running-average recursion
///   S(t) = t/(t+1) * S(t-1) + 1/(t+1) * X(t),  S(0) = X(0),
/// so S(t) is the mean of X(0..t).
Eigen::VectorXd running_average_step(const Eigen::VectorXd& previous_average,
                                     const Eigen::VectorXd& current_state, long t);

/// Snapshots of one trajectory at selected steps. Detection operates on this.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(int n_regular, long horizon) : n_regular_(n_regular), horizon_(horizon) {}

    /// Steps must be appended in strictly increasing order.
    void add_snapshot(long step, Eigen::VectorXd state, Eigen::VectorXd average);

    int n_regular() const noexcept { return n_regular_; }
    long horizon() const noexcept { return horizon_; }
    const std::vector<long>& steps() const noexcept { return steps_; }
    bool has_step(long step) const;

    /// Throw InsufficientData when the step was not recorded.
    const Eigen::VectorXd& state_at(long step) const;
    const Eigen::VectorXd& average_at(long step) const;

private:
    std::size_t index_of(long step, const char* what) const;

    int n_regular_ = 0;
    long horizon_ = 0;
    std::vector<long> steps_;
    std::vector<Eigen::VectorXd> states_;
    std::vector<Eigen::VectorXd> averages_;
};

struct SimulationOptions {
    long horizon = 0;
    /// Absolute step indices to record; duplicates are dropped. Every entry
    /// must lie in [0, horizon].
    std::vector<long> record_steps;
    /// When set, initial and stubborn opinions must satisfy |value| <= bound.
    std::optional<double> opinion_bound;
};

/// Runs `horizon` steps of the process and returns the requested snapshots.
/// Memory use is proportional to the number of recorded steps, not to the
/// horizon.
Trajectory simulate(const SampledGraph& graph, const Eigen::VectorXd& initial_opinions,
                    const Eigen::VectorXd& stubborn_opinions, const SimulationOptions& options,
                    Rng& rng);

}  // namespace gossipdet

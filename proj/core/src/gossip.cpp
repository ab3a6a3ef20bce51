#include "gossipdet/gossip.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gossipdet/errors.hpp"
#include "gossipdet/numeric.hpp"

namespace gossipdet {

InteractionDistribution::InteractionDistribution(const SampledGraph& graph)
    : edges_(graph.edges()) {
    if (edges_.empty()) throw NoEdgesError();
}

GossipState::GossipState(Eigen::VectorXd initial_opinions, Eigen::VectorXd stubborn_opinions)
    : opinions_(std::move(initial_opinions)), stubborn_(std::move(stubborn_opinions)) {
    if (!opinions_.allFinite() || !stubborn_.allFinite())
        throw InvalidInput("opinions must be finite");
    segment_sum_ = Eigen::VectorXd::Zero(opinions_.size());
    segment_comp_ = Eigen::VectorXd::Zero(opinions_.size());
    held_since_.assign(static_cast<std::size_t>(opinions_.size()), 0);
}

void GossipState::flush_agent(int agent) const {
    auto& since = held_since_[static_cast<std::size_t>(agent)];
    const long held = step_ - since + 1;
    if (held <= 0) return;
    kahan_add(segment_sum_(agent), segment_comp_(agent),
              opinions_(agent) * static_cast<double>(held));
    since = step_ + 1;
}

Eigen::VectorXd GossipState::running_average() const {
    for (int i = 0; i < n_regular(); ++i) flush_agent(i);
    return segment_sum_ / static_cast<double>(step_ + 1);
}

void GossipState::apply_selected(Edge edge) {
    const auto [a, b] = edge;
    const int nr = n_regular();
    if (a < nr && b < nr) {
        flush_agent(a);
        flush_agent(b);
        const double mid = 0.5 * (opinions_(a) + opinions_(b));
        opinions_(a) = mid;
        opinions_(b) = mid;
    } else if (a < nr || b < nr) {
        const int regular = a < nr ? a : b;
        const int stubborn = a < nr ? b : a;
        flush_agent(regular);
        opinions_(regular) = 0.5 * (opinions_(regular) + stubborn_(stubborn - nr));
    }
    // Stubborn-stubborn contact moves nobody but still consumes the step.
    ++step_;
}

void GossipState::apply_edge(Edge edge, const SampledGraph& graph) {
    if (graph.n_regular() != n_regular() || graph.n_stubborn() != n_stubborn())
        throw ContractViolation("graph size does not match the state");
    if (!graph.has_edge(edge.first, edge.second)) {
        std::ostringstream msg;
        msg << "edge {" << edge.first + 1 << "," << edge.second + 1 << "} is not in the graph";
        throw ContractViolation(msg.str());
    }
    apply_selected(edge);
}

Edge step(GossipState& state, const InteractionDistribution& distribution, Rng& rng) {
    const Edge edge = distribution.sample(rng);
    state.apply_selected(edge);
    return edge;
}

Eigen::VectorXd running_average_step(const Eigen::VectorXd& previous_average,
                                     const Eigen::VectorXd& current_state, long t) {
    if (previous_average.size() != current_state.size())
        throw ContractViolation("running-average dimensions do not match");
    if (t < 1) throw ContractViolation("running-average recursion starts at t = 1");
    const double tt = static_cast<double>(t);
    return (tt / (tt + 1.0)) * previous_average + (1.0 / (tt + 1.0)) * current_state;
}

void Trajectory::add_snapshot(long step, Eigen::VectorXd state, Eigen::VectorXd average) {
    if (!steps_.empty() && step <= steps_.back())
        throw ContractViolation("trajectory snapshots must be appended in increasing step order");
    steps_.push_back(step);
    states_.push_back(std::move(state));
    averages_.push_back(std::move(average));
}

bool Trajectory::has_step(long step) const {
    return std::binary_search(steps_.begin(), steps_.end(), step);
}

std::size_t Trajectory::index_of(long step, const char* what) const {
    const auto it = std::lower_bound(steps_.begin(), steps_.end(), step);
    if (it == steps_.end() || *it != step) {
        std::ostringstream msg;
        msg << what << " at step " << step << " was not recorded (horizon " << horizon_ << ", "
            << steps_.size() << " snapshots)";
        throw InsufficientData(msg.str());
    }
    return static_cast<std::size_t>(it - steps_.begin());
}

const Eigen::VectorXd& Trajectory::state_at(long step) const {
    return states_[index_of(step, "state")];
}

const Eigen::VectorXd& Trajectory::average_at(long step) const {
    return averages_[index_of(step, "state average")];
}

Trajectory simulate(const SampledGraph& graph, const Eigen::VectorXd& initial_opinions,
                    const Eigen::VectorXd& stubborn_opinions, const SimulationOptions& options,
                    Rng& rng) {
    if (initial_opinions.size() != graph.n_regular())
        throw ContractViolation("initial opinion vector length does not match the graph");
    if (stubborn_opinions.size() != graph.n_stubborn())
        throw ContractViolation("stubborn opinion vector length does not match the graph");
    if (options.horizon < 0) throw InvalidInput("negative horizon");
    if (options.opinion_bound) {
        const double bound = *options.opinion_bound;
        if (!(bound > 0.0)) throw InvalidInput("opinion bound must be positive");
        const bool ok = (initial_opinions.size() == 0 ||
                         initial_opinions.cwiseAbs().maxCoeff() <= bound) &&
                        (stubborn_opinions.size() == 0 ||
                         stubborn_opinions.cwiseAbs().maxCoeff() <= bound);
        if (!ok) throw InvalidInput("opinions exceed the declared bound");
    }

    std::vector<long> record = options.record_steps;
    std::sort(record.begin(), record.end());
    record.erase(std::unique(record.begin(), record.end()), record.end());
    if (!record.empty() && (record.front() < 0 || record.back() > options.horizon))
        throw InvalidInput("record steps must lie within [0, horizon]");

    GossipState state(initial_opinions, stubborn_opinions);
    const InteractionDistribution distribution(graph);

    Trajectory trajectory(graph.n_regular(), options.horizon);
    auto next_record = record.begin();
    for (long t = 0; t <= options.horizon; ++t) {
        if (next_record != record.end() && *next_record == t) {
            trajectory.add_snapshot(t, state.opinions(), state.running_average());
            ++next_record;
        }
        if (t < options.horizon) step(state, distribution, rng);
    }
    return trajectory;
}

}  // namespace gossipdet

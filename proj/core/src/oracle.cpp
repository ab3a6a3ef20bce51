#include "gossipdet/oracle.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <deque>
#include <sstream>

#include "gossipdet/errors.hpp"

namespace gossipdet {

namespace {

struct Assembler {
    Eigen::MatrixXd eq;
    Eigen::MatrixXd er;
    int n_regular;

    Assembler(int n_r, int n_s)
        : eq(Eigen::MatrixXd::Identity(n_r, n_r)), er(Eigen::MatrixXd::Zero(n_r, n_s)),
          n_regular(n_r) {}

    // Adds one pair {a, b} (a < b) selected with probability w. A pair with
    // no regular endpoint contributes only the identity, which is already in.
    void add_pair(int a, int b, double w) {
        if (b < n_regular) {
            eq(a, a) -= 0.5 * w;
            eq(b, b) -= 0.5 * w;
            eq(a, b) += 0.5 * w;
            eq(b, a) += 0.5 * w;
        } else if (a < n_regular) {
            eq(a, a) -= 0.5 * w;
            er(a, b - n_regular) += 0.5 * w;
        }
    }
};

}  // namespace

ExpectedDynamics expected_update_matrices(const SampledGraph& graph) {
    if (graph.edge_count() == 0) throw NoEdgesError();
    Assembler assembler(graph.n_regular(), graph.n_stubborn());
    const double w = 1.0 / static_cast<double>(graph.edge_count());
    for (const auto& [a, b] : graph.edges()) assembler.add_pair(a, b, w);
    return {std::move(assembler.eq), std::move(assembler.er),
            ExpectedDynamics::Source::sampled_graph};
}

ExpectedDynamics expected_update_matrices(const AveragedGraph& averaged) {
    if (!(averaged.expected_edge_count > 0.0))
        throw InvalidInput("averaged graph has zero expected edge count");
    const int n = averaged.n_regular + averaged.n_stubborn;
    Assembler assembler(averaged.n_regular, averaged.n_stubborn);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (averaged.weights(a, b) > 0.0)
                assembler.add_pair(a, b, averaged.weights(a, b) / averaged.expected_edge_count);
    return {std::move(assembler.eq), std::move(assembler.er),
            ExpectedDynamics::Source::averaged_graph};
}

Eigen::VectorXd expected_final_opinions(const ExpectedDynamics& dynamics,
                                        const Eigen::VectorXd& stubborn_opinions,
                                        const SolveOptions& options) {
    const int n_r = dynamics.n_regular();
    if (stubborn_opinions.size() != dynamics.n_stubborn())
        throw ContractViolation("stubborn opinion vector length does not match the dynamics");
    if (n_r == 0) return Eigen::VectorXd();

    // Influence must reach every regular agent or (I - E{Q}) is singular.
    // A graph search gives a named diagnostic instead of a failed
    // factorization.
    std::vector<char> reached(static_cast<std::size_t>(n_r), 0);
    std::deque<int> frontier;
    for (int i = 0; i < n_r; ++i) {
        if (dynamics.expected_r.row(i).sum() > 0.0) {
            reached[static_cast<std::size_t>(i)] = 1;
            frontier.push_back(i);
        }
    }
    while (!frontier.empty()) {
        const int i = frontier.front();
        frontier.pop_front();
        for (int j = 0; j < n_r; ++j) {
            if (j != i && !reached[static_cast<std::size_t>(j)] && dynamics.expected_q(i, j) > 0.0) {
                reached[static_cast<std::size_t>(j)] = 1;
                frontier.push_back(j);
            }
        }
    }
    std::vector<int> unreachable;
    for (int i = 0; i < n_r; ++i)
        if (!reached[static_cast<std::size_t>(i)]) unreachable.push_back(i + 1);
    if (!unreachable.empty()) {
        std::ostringstream msg;
        msg << "no stubborn influence reaches " << unreachable.size()
            << " regular agent(s):";
        for (std::size_t k = 0; k < unreachable.size() && k < 10; ++k) msg << ' ' << unreachable[k];
        if (unreachable.size() > 10) msg << " ...";
        throw SingularSystem(msg.str(), std::move(unreachable));
    }

    const Eigen::VectorXd rhs = dynamics.n_stubborn() == 0
                                    ? Eigen::VectorXd::Zero(n_r).eval()
                                    : (dynamics.expected_r * stubborn_opinions).eval();

    if (n_r <= options.dense_cutoff) {
        const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n_r, n_r) - dynamics.expected_q;
        return Eigen::PartialPivLU<Eigen::MatrixXd>(system).solve(rhs);
    }

    // E{Q} is a contraction once stubborn influence reaches everyone, so the
    // fixed point x = E{Q} x + E{R} z converges linearly.
    Eigen::VectorXd x = rhs;
    for (long iteration = 0; iteration < options.max_fixed_point_iterations; ++iteration) {
        x = (dynamics.expected_q * x + rhs).eval();
        if (iteration % 50 == 49) {
            const double residual =
                (x - dynamics.expected_q * x - rhs).cwiseAbs().maxCoeff();
            if (residual <= options.fixed_point_residual) return x;
        }
    }
    throw Error("fixed-point solve did not reach the requested residual");
}

CommunityReference community_reference(const Eigen::VectorXd& state,
                                       const CommunityStructure& truth) {
    if (state.size() != truth.size())
        throw ContractViolation("state and truth have different lengths");
    if (!truth.valid()) throw ContractViolation("truth labels must be 1 or 2");

    double sum1 = 0.0, sum2 = 0.0;
    long count1 = 0, count2 = 0;
    for (int i = 0; i < state.size(); ++i) {
        if (truth.labels[static_cast<std::size_t>(i)] == 1) {
            sum1 += state(i);
            ++count1;
        } else {
            sum2 += state(i);
            ++count2;
        }
    }
    CommunityReference ref;
    ref.mean1 = count1 > 0 ? sum1 / static_cast<double>(count1) : std::nan("");
    ref.mean2 = count2 > 0 ? sum2 / static_cast<double>(count2) : std::nan("");
    for (int i = 0; i < state.size(); ++i) {
        const double mean = truth.labels[static_cast<std::size_t>(i)] == 1 ? ref.mean1 : ref.mean2;
        ref.max_deviation = std::max(ref.max_deviation, std::abs(state(i) - mean));
    }
    return ref;
}

CommunityReference community_reference(const Trajectory& trajectory,
                                       const CommunityStructure& truth, long step) {
    return community_reference(trajectory.state_at(step), truth);
}

}  // namespace gossipdet

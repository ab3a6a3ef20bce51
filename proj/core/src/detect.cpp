#include "gossipdet/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "gossipdet/errors.hpp"
#include "gossipdet/numeric.hpp"

namespace gossipdet {

namespace {

// Within-cluster sum of squared deviations of one contiguous block of the
// sorted values, recomputed in two passes so the reported cost does not carry
// the cancellation error of the prefix-sum scan.
double block_sse(std::span<const double> sorted, std::size_t begin, std::size_t end) {
    if (end <= begin) return 0.0;
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += sorted[i];
    const double mean = sum / static_cast<double>(end - begin);
    double sse = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
        const double d = sorted[i] - mean;
        sse += d * d;
    }
    return sse;
}

}  // namespace

DetectionResult kmeans_two(std::span<const double> values) {
    const std::size_t m = values.size();
    if (m == 0) throw InvalidInput("cannot cluster an empty value set");
    for (double v : values)
        if (!std::isfinite(v)) throw InvalidInput("cannot cluster non-finite values");

    // Sort indices by value, stable in the agent index, so equal values can
    // only be separated at the chosen split point.
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return values[static_cast<std::size_t>(a)] < values[static_cast<std::size_t>(b)];
    });
    std::vector<double> sorted(m);
    for (std::size_t i = 0; i < m; ++i) sorted[i] = values[static_cast<std::size_t>(order[i])];

    DetectionResult result;
    result.labels.labels.assign(m, 1);

    if (m == 1 || sorted.front() == sorted.back()) {
        // Constant input: nothing to separate.
        result.split_value = sorted.front();
        result.cost = 0.0;
        return result;
    }

    // Prefix-sum scan over the m-1 contiguous splits; ties keep the smallest
    // split index.
    std::vector<double> prefix(m + 1, 0.0), prefix_sq(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        prefix[i + 1] = prefix[i] + sorted[i];
        prefix_sq[i + 1] = prefix_sq[i] + sorted[i] * sorted[i];
    }
    std::size_t best = 1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < m; ++k) {
        const double left = prefix_sq[k] - prefix[k] * prefix[k] / static_cast<double>(k);
        const double right_sum = prefix[m] - prefix[k];
        const double right =
            prefix_sq[m] - prefix_sq[k] - right_sum * right_sum / static_cast<double>(m - k);
        const double cost = left + right;
        if (cost < best_cost) {
            best_cost = cost;
            best = k;
        }
    }

    for (std::size_t i = best; i < m; ++i)
        result.labels.labels[static_cast<std::size_t>(order[i])] = 2;
    result.split_value = 0.5 * (sorted[best - 1] + sorted[best]);
    result.cost = block_sse(sorted, 0, best) + block_sse(sorted, best, m);
    return result;
}

double accuracy(const CommunityStructure& truth, const CommunityStructure& estimate) {
    if (truth.size() != estimate.size())
        throw ContractViolation("community structures have different lengths");
    if (truth.size() == 0) throw InvalidInput("empty community structures");
    long direct = 0, swapped = 0;
    for (std::size_t i = 0; i < truth.labels.size(); ++i) {
        direct += truth.labels[i] == estimate.labels[i];
        swapped += truth.labels[i] == 3 - estimate.labels[i];
    }
    return static_cast<double>(std::max(direct, swapped)) / static_cast<double>(truth.size());
}

long default_transient_step(int network_size) {
    if (network_size < 1) throw InvalidInput("network size must be positive");
    const double n = static_cast<double>(network_size);
    return round_half_away(n * std::log(n));
}

TransientDetection detect_transient(const Trajectory& trajectory, int network_size,
                                    const TransientDetectionOptions& options) {
    const long step = options.step_override ? *options.step_override
                                            : default_transient_step(network_size);
    const Eigen::VectorXd& state = trajectory.state_at(step);

    TransientDetection detection;
    detection.step_used = step;
    detection.result = kmeans_two({state.data(), static_cast<std::size_t>(state.size())});

    if (options.p_within && options.p_between) {
        const double n = static_cast<double>(network_size);
        const double limit = n * *options.p_within / (*options.p_between * std::log(n));
        if (!(static_cast<double>(step) < limit)) {
            std::ostringstream msg;
            msg << "clustering step " << step << " is outside the transient window (limit "
                << limit << " for the given link probabilities)";
            detection.window_warning = msg.str();
        }
    }
    return detection;
}

DetectionResult detect_time_average(const Trajectory& trajectory, long clustering_step) {
    if (clustering_step < 1) throw InvalidInput("time-average clustering needs a step >= 1");
    const Eigen::VectorXd& average = trajectory.average_at(clustering_step);
    return kmeans_two({average.data(), static_cast<std::size_t>(average.size())});
}

AdaptiveDetection adaptive_time_average(const Trajectory& trajectory, double threshold,
                                        long stride) {
    if (stride < 1) throw InvalidInput("stride must be at least 1");
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw InvalidInput("threshold must be in [0, 1]");

    std::vector<long> checks;
    for (long step : trajectory.steps())
        if (step == 0 || step % stride == 0) checks.push_back(step);
    if (checks.empty())
        throw InsufficientData("no recorded steps fall on the requested stride");

    auto cluster_at = [&](long step) {
        const Eigen::VectorXd& average = trajectory.average_at(step);
        return kmeans_two({average.data(), static_cast<std::size_t>(average.size())});
    };

    AdaptiveDetection detection;
    detection.chosen_step = checks.front();
    detection.result = cluster_at(checks.front());
    DetectionResult previous = detection.result;

    for (std::size_t i = 1; i < checks.size(); ++i) {
        DetectionResult current = cluster_at(checks[i]);
        const double change = 1.0 - accuracy(previous.labels, current.labels);
        detection.chosen_step = checks[i];
        detection.result = current;
        if (change <= threshold) {
            detection.converged = true;
            return detection;
        }
        previous = std::move(current);
    }
    return detection;  // recording exhausted before the estimate settled
}

std::optional<std::string> initial_sum_warning(const Eigen::VectorXd& initial_opinions,
                                               const CommunityStructure& truth) {
    if (initial_opinions.size() != truth.size())
        throw ContractViolation("initial opinions and truth have different lengths");
    double sum1 = 0.0, sum2 = 0.0;
    for (int i = 0; i < truth.size(); ++i)
        (truth.labels[static_cast<std::size_t>(i)] == 1 ? sum1 : sum2) += initial_opinions(i);
    if (std::abs(sum1 - sum2) > 1e-12) return std::nullopt;
    std::ostringstream msg;
    msg << "the two communities start from equal opinion sums (" << sum1
        << "); transient-state detection is uninformative for this initialization";
    return msg.str();
}

}  // namespace gossipdet

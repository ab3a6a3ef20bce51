#include "gossipdet/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "gossipdet/detect.hpp"
#include "gossipdet/errors.hpp"
#include "gossipdet/gossip.hpp"
#include "gossipdet/numeric.hpp"

namespace gossipdet {

namespace {

constexpr double kClampValue = 0.99;

void parallel_for(int workers, std::size_t count, const std::function<void(std::size_t)>& body) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;
    auto drain = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int spawned = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), count));
    pool.reserve(static_cast<std::size_t>(spawned));
    for (int w = 0; w < spawned; ++w) pool.emplace_back(drain);
    for (auto& thread : pool) thread.join();
    if (failure) std::rethrow_exception(failure);
}

Eigen::VectorXd draw_initial_opinions(const InitSpec& init, const CommunityStructure& truth,
                                      Rng& rng) {
    Eigen::VectorXd x(truth.size());
    for (int i = 0; i < truth.size(); ++i) {
        double low = init.low, high = init.high;
        if (init.kind == InitSpec::Kind::per_community) {
            const bool first = truth.labels[static_cast<std::size_t>(i)] == 1;
            low = first ? init.low1 : init.low2;
            high = first ? init.high1 : init.high2;
        }
        x(i) = low + uniform01(rng) * (high - low);
    }
    return x;
}

Eigen::VectorXd signed_stubborn_opinions(int n_stubborn) {
    Eigen::VectorXd z(n_stubborn);
    const int split = (n_stubborn + 1) / 2;
    for (int j = 0; j < n_stubborn; ++j) z(j) = j < split ? 1.0 : -1.0;
    return z;
}

struct SweepPoint {
    long n = 0;
    std::size_t n_index = 0;  // position in config.n_values, stable under filtering
    std::vector<SampledGraph> graphs;
    Eigen::VectorXd stubborn_opinions;
    CommunityStructure truth;
    long detection_step = 0;
    long horizon = 0;
    bool every_step = false;
};

std::vector<RunRecord> run_trajectory(const ExperimentConfig& config, const SweepPoint& point,
                                      const SampledGraph& graph, int graph_sample, int trajectory,
                                      Rng& rng, std::atomic<long>& equal_sum_starts) {
    std::vector<RunRecord> records;
    auto base_record = [&](DetectionAlgorithm algorithm, long step) {
        RunRecord r;
        r.n = point.n;
        r.graph_sample = graph_sample;
        r.trajectory = trajectory;
        r.algorithm = algorithm;
        r.detection_step = step;
        return r;
    };

    try {
        const Eigen::VectorXd x0 = draw_initial_opinions(config.init, point.truth, rng);
        const bool wants_transient =
            std::find(config.algorithms.begin(), config.algorithms.end(),
                      DetectionAlgorithm::transient_state) != config.algorithms.end();
        if (wants_transient && initial_sum_warning(x0, point.truth)) ++equal_sum_starts;

        SimulationOptions sim;
        sim.horizon = point.horizon;
        if (point.every_step) {
            sim.record_steps.resize(static_cast<std::size_t>(point.horizon) + 1);
            std::iota(sim.record_steps.begin(), sim.record_steps.end(), 0l);
        } else {
            sim.record_steps = {point.detection_step};
        }
        const Trajectory traj =
            simulate(graph, x0, point.stubborn_opinions, sim, rng);

        for (DetectionAlgorithm algorithm : config.algorithms) {
            const bool transient = algorithm == DetectionAlgorithm::transient_state;
            const long first_step = transient ? 0 : 1;
            const long last_step = point.every_step ? point.horizon : point.detection_step;
            for (long t = point.every_step ? first_step : last_step; t <= last_step; ++t) {
                const Eigen::VectorXd& values = transient ? traj.state_at(t) : traj.average_at(t);
                const DetectionResult detection =
                    kmeans_two({values.data(), static_cast<std::size_t>(values.size())});
                RunRecord r = base_record(algorithm, t);
                r.accuracy = accuracy(point.truth, detection.labels);
                records.push_back(std::move(r));
            }
        }
    } catch (const std::exception& e) {
        records.clear();
        for (DetectionAlgorithm algorithm : config.algorithms) {
            RunRecord r = base_record(algorithm, point.detection_step);
            r.accuracy = std::numeric_limits<double>::quiet_NaN();
            r.error = e.what();
            records.push_back(std::move(r));
        }
    }
    return records;
}

}  // namespace

double Schedule::operator()(long n) const {
    if (n < 1) throw InvalidInput("schedules are defined for n >= 1");
    const double nn = static_cast<double>(n);
    return coeff * std::pow(std::log(nn), log_exp) * std::pow(nn, n_exp);
}

std::string algorithm_name(DetectionAlgorithm algorithm) {
    return algorithm == DetectionAlgorithm::transient_state ? "alg1" : "alg2";
}

DetectionAlgorithm algorithm_from_name(const std::string& name) {
    if (name == "alg1" || name == "1" || name == "transient")
        return DetectionAlgorithm::transient_state;
    if (name == "alg2" || name == "2" || name == "average") return DetectionAlgorithm::time_average;
    throw InvalidInput("unknown detection algorithm '" + name + "'");
}

ExperimentConfig fig2_config() {
    ExperimentConfig config;
    config.name = "fig2";
    config.n_values = {10, 30, 100, 300, 1000, 3000, 10000};
    config.regular_fraction = 0.9;
    config.p_within = {1.0, 2.5, -1.0};
    config.p_between = {1.0, 1.0, -1.0};
    config.p_stubborn = {1.0, 1.0, -1.0};
    config.detection_step = {1.0, 1.0, 1.0};
    config.algorithms = {DetectionAlgorithm::transient_state};
    config.init.kind = InitSpec::Kind::per_community;
    config.init.low1 = -1.0;
    config.init.high1 = 0.0;
    config.init.low2 = 0.0;
    config.init.high2 = 1.0;
    return config;
}

ExperimentConfig fig3_config() {
    ExperimentConfig config;
    config.name = "fig3";
    config.n_values = {10, 30, 100, 300, 1000};
    config.regular_fraction = 0.9;
    config.p_within = {1.0, 2.0, -1.0};
    config.p_between = {1.0, 1.0, -1.0};
    config.p_stubborn = {1.0, 2.5, -1.0};
    config.detection_step = {1.0, 2.5, 1.0};
    config.algorithms = {DetectionAlgorithm::time_average};
    config.init.kind = InitSpec::Kind::uniform;
    config.init.low = -1.0;
    config.init.high = 1.0;
    return config;
}

ExperimentConfig karate_config() {
    ExperimentConfig config;
    config.name = "karate";
    config.n_values = {34};
    config.use_karate_graph = true;
    config.record_every_step = true;
    config.fixed_horizon = 1000;
    config.algorithms = {DetectionAlgorithm::transient_state, DetectionAlgorithm::time_average};
    config.graph_samples = 1;
    config.trajectories_per_graph = 400;
    config.init.kind = InitSpec::Kind::uniform;
    config.init.low = -1.0;
    config.init.high = 1.0;
    return config;
}

ResolvedPoint resolve_config(const ExperimentConfig& config, long n) {
    if (config.use_karate_graph)
        throw InvalidInput("the karate experiment uses the built-in graph, not sampled parameters");
    if (!(config.regular_fraction > 0.0 && config.regular_fraction < 1.0))
        throw InvalidInput("regular fraction must lie in (0, 1)");

    ResolvedPoint point;
    const int n_regular = static_cast<int>(round_half_away(config.regular_fraction * static_cast<double>(n)));
    const int n_stubborn = static_cast<int>(n) - n_regular;
    if (n_regular < 2) throw InvalidInput("sweep point too small: fewer than two regular agents");
    if (n_stubborn < 0) throw InvalidInput("regular fraction rounds above the network size");

    auto clamp_probability = [&](double value, const char* name) {
        if (value >= 1.0) {
            std::ostringstream msg;
            msg << "n=" << n << ": schedule value " << name << " = " << value
                << " clamped to " << kClampValue;
            point.warnings.push_back(msg.str());
            return kClampValue;
        }
        return value;
    };

    point.params.n_regular = n_regular;
    point.params.n_stubborn = n_stubborn;
    point.params.p_within = clamp_probability(config.p_within(n), "p_within");
    point.params.p_between = clamp_probability(config.p_between(n), "p_between");
    const double p_stub = clamp_probability(config.p_stubborn(n), "p_stubborn");
    point.params.stubborn_links = block_stubborn_links(n_regular, n_stubborn, p_stub);
    for (auto& warning : point.params.validate()) point.warnings.push_back("n=" + std::to_string(n) + ": " + warning);

    point.stubborn_opinions = signed_stubborn_opinions(n_stubborn);
    point.detection_step = std::max<long>(1, round_half_away(config.detection_step(n)));
    return point;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    if (config.n_values.empty()) throw InvalidInput("experiment has no sweep points");
    if (config.graph_samples < 1 || config.trajectories_per_graph < 1)
        throw InvalidInput("need at least one graph sample and one trajectory");
    if (config.algorithms.empty()) throw InvalidInput("no detection algorithm configured");
    if (options.parallelism < 1) throw InvalidInput("parallelism must be at least 1");
    if (config.record_every_step && config.fixed_horizon < 1)
        throw InvalidInput("every-step experiments need a positive fixed horizon");

    const auto start = std::chrono::steady_clock::now();
    ExperimentResult result;

    const std::uint64_t trajectories = static_cast<std::uint64_t>(config.trajectories_per_graph);
    const std::uint64_t streams_per_graph = trajectories + 1;
    const std::uint64_t streams_per_n =
        static_cast<std::uint64_t>(config.graph_samples) * streams_per_graph;

    bool skipped_any = false;
    std::atomic<long> equal_sum_starts{0};

    for (std::size_t n_index = 0; n_index < config.n_values.size(); ++n_index) {
        const long n = config.n_values[n_index];
        if (!options.full_sweep && n > options.desk_scale_cap) {
            skipped_any = true;
            continue;
        }

        SweepPoint point;
        point.n = n;
        point.n_index = n_index;
        point.every_step = config.record_every_step;

        if (config.use_karate_graph) {
            KarateClub club = karate_club();
            point.stubborn_opinions = club.stubborn_opinions;
            point.truth = club.truth;
            point.detection_step = config.record_every_step
                                       ? config.fixed_horizon
                                       : std::max<long>(1, round_half_away(config.detection_step(n)));
            for (int g = 0; g < config.graph_samples; ++g) point.graphs.push_back(club.graph);
        } else {
            ResolvedPoint resolved = resolve_config(config, n);
            for (auto& warning : resolved.warnings) result.warnings.push_back(std::move(warning));
            point.stubborn_opinions = std::move(resolved.stubborn_opinions);
            point.truth = CommunityStructure::canonical(resolved.params.n_regular);
            point.detection_step = resolved.detection_step;
            point.graphs.reserve(static_cast<std::size_t>(config.graph_samples));
            for (int g = 0; g < config.graph_samples; ++g) {
                const std::uint64_t stream =
                    static_cast<std::uint64_t>(n_index) * streams_per_n +
                    static_cast<std::uint64_t>(g) * streams_per_graph;
                Rng rng = make_rng(derive_seed(config.master_seed, stream));
                point.graphs.push_back(sample_sbm_s(resolved.params, rng));
            }
        }
        point.horizon = config.record_every_step ? config.fixed_horizon : point.detection_step;

        const std::size_t task_count = static_cast<std::size_t>(config.graph_samples) *
                                       static_cast<std::size_t>(config.trajectories_per_graph);
        std::vector<std::vector<RunRecord>> task_records(task_count);
        parallel_for(options.parallelism, task_count, [&](std::size_t task) {
            const int g = static_cast<int>(task / trajectories);
            const int k = static_cast<int>(task % trajectories);
            const std::uint64_t stream = static_cast<std::uint64_t>(n_index) * streams_per_n +
                                         static_cast<std::uint64_t>(g) * streams_per_graph + 1 +
                                         static_cast<std::uint64_t>(k);
            Rng rng = make_rng(derive_seed(config.master_seed, stream));
            task_records[task] = run_trajectory(config, point, point.graphs[static_cast<std::size_t>(g)],
                                                g, k, rng, equal_sum_starts);
        });
        for (auto& records : task_records)
            for (auto& record : records) result.records.push_back(std::move(record));
    }

    if (result.records.empty())
        throw InvalidInput("every sweep point exceeds the desk-scale cap; pass the full-sweep flag");
    if (skipped_any)
        result.warnings.push_back("sweep points above n=" + std::to_string(options.desk_scale_cap) +
                                  " skipped; enable the full sweep to include them");
    if (const long starts = equal_sum_starts.load(); starts > 0)
        result.warnings.push_back(std::to_string(starts) +
                                  " trajectories started from equal community opinion sums");

    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records,
                                  const std::vector<double>& thresholds) {
    if (records.empty()) throw InvalidInput("cannot summarize an empty record set");

    std::map<std::pair<long, int>, SummaryRow> rows;
    std::map<std::pair<long, int>, std::vector<double>> accuracies;
    for (const auto& record : records) {
        const auto key = std::make_pair(record.n, static_cast<int>(record.algorithm));
        auto& row = rows[key];
        row.n = record.n;
        row.algorithm = record.algorithm;
        ++row.runs;
        if (std::isnan(record.accuracy)) {
            ++row.failures;
        } else {
            accuracies[key].push_back(record.accuracy);
        }
    }

    std::vector<SummaryRow> out;
    out.reserve(rows.size());
    for (auto& [key, row] : rows) {
        const auto& values = accuracies[key];
        if (values.empty()) {
            row.mean_accuracy = std::numeric_limits<double>::quiet_NaN();
            row.p_at_least.assign(thresholds.size(), std::numeric_limits<double>::quiet_NaN());
        } else {
            double sum = 0.0;
            for (double a : values) sum += a;
            row.mean_accuracy = sum / static_cast<double>(values.size());
            row.p_at_least.reserve(thresholds.size());
            for (double threshold : thresholds) {
                long hits = 0;
                for (double a : values) hits += a >= threshold;
                row.p_at_least.push_back(static_cast<double>(hits) /
                                         static_cast<double>(values.size()));
            }
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<StepCurvePoint> per_step_curves(const std::vector<RunRecord>& records) {
    std::map<std::pair<int, long>, std::pair<double, long>> sums;
    for (const auto& record : records) {
        if (std::isnan(record.accuracy)) continue;
        auto& [sum, count] = sums[{static_cast<int>(record.algorithm), record.detection_step}];
        sum += record.accuracy;
        ++count;
    }
    std::vector<StepCurvePoint> curves;
    curves.reserve(sums.size());
    for (const auto& [key, value] : sums)
        curves.push_back({static_cast<DetectionAlgorithm>(key.first), key.second,
                          value.first / static_cast<double>(value.second)});
    return curves;
}

}  // namespace gossipdet

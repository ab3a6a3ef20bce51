// Command-line front end: graph sampling, trajectory simulation, community
// detection, expectation oracles, and the built-in experiment sweeps.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "gossipdet/detect.hpp"
#include "gossipdet/errors.hpp"
#include "gossipdet/experiment.hpp"
#include "gossipdet/gossip.hpp"
#include "gossipdet/io.hpp"
#include "gossipdet/numeric.hpp"
#include "gossipdet/oracle.hpp"
#include "gossipdet/sbm.hpp"

namespace {

using namespace gossipdet;

// Callback for optional<double> flags; returns false on malformed numbers so
// CLI11 reports a conversion error.
auto store_double(std::optional<double>& slot) {
    return [&slot](const CLI::results_t& res) {
        try {
            slot = std::stod(res.at(0));
            return true;
        } catch (const std::exception&) {
            return false;
        }
    };
}

Eigen::VectorXd parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw InvalidInput("malformed number '" + item + "' in list '" + text + "'");
        }
    }
    Eigen::VectorXd v(static_cast<long>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<long>(i)) = values[i];
    return v;
}

Eigen::VectorXd signed_halves(int n_stubborn) {
    Eigen::VectorXd z(n_stubborn);
    for (int j = 0; j < n_stubborn; ++j) z(j) = j < (n_stubborn + 1) / 2 ? 1.0 : -1.0;
    return z;
}

// "-" means stdout.
void write_output(const std::string& path, const std::function<void(std::ostream&)>& writer) {
    if (path == "-") {
        writer(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    writer(out);
    if (!out) throw IoError("failed while writing '" + path + "'");
}

GraphBundle load_graph(const std::string& path, bool karate) {
    if (karate) {
        auto club = karate_club();
        return {std::move(club.graph), std::move(club.stubborn_opinions)};
    }
    if (path.empty()) throw InvalidInput("pass --graph <file> or --karate");
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open '" + path + "' for reading");
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return read_graph_json(in);
    SampledGraph graph = read_edge_list(in);
    Eigen::VectorXd z = signed_halves(graph.n_stubborn());
    return {std::move(graph), std::move(z)};
}

struct GraphSpec {
    long n = 0;
    double r0 = 0.9;
    int n_regular = 0;
    int n_stubborn = 0;
    double p_within = 0.0;
    double p_between = 0.0;
    double p_stubborn = 0.0;

    SbmSParams resolve() const {
        SbmSParams params;
        if (n > 0) {
            params.n_regular = static_cast<int>(round_half_away(r0 * static_cast<double>(n)));
            params.n_stubborn = static_cast<int>(n) - params.n_regular;
        } else {
            params.n_regular = n_regular;
            params.n_stubborn = n_stubborn;
        }
        params.p_within = p_within;
        params.p_between = p_between;
        params.stubborn_links =
            block_stubborn_links(params.n_regular, params.n_stubborn, p_stubborn);
        return params;
    }
};

void add_graph_spec_options(CLI::App* cmd, GraphSpec& spec) {
    cmd->add_option("--n", spec.n, "Network size; split into regular/stubborn via --r0");
    cmd->add_option("--r0", spec.r0, "Fraction of regular agents (with --n)")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--n-regular", spec.n_regular, "Regular agent count (alternative to --n)");
    cmd->add_option("--n-stubborn", spec.n_stubborn, "Stubborn agent count");
    cmd->add_option("--p-within", spec.p_within, "Within-community link probability");
    cmd->add_option("--p-between", spec.p_between, "Between-community link probability");
    cmd->add_option("--p-stubborn", spec.p_stubborn,
                    "Two-block regular-stubborn link probability");
}

CommunityStructure load_truth(const std::string& truth_spec, int n_regular) {
    if (truth_spec == "canonical") return CommunityStructure::canonical(n_regular);
    if (truth_spec == "karate") {
        auto truth = karate_club().truth;
        if (truth.size() != n_regular)
            throw InvalidInput("karate truth covers 32 regular agents, trajectory has " +
                               std::to_string(n_regular));
        return truth;
    }
    std::ifstream in(truth_spec);
    if (!in) throw InvalidInput("cannot open truth file '" + truth_spec + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed truth JSON: ") + e.what());
    }
    CommunityStructure truth;
    const auto& labels = j.is_array() ? j : j.at("labels");
    for (const auto& label : labels) truth.labels.push_back(label.get<int>());
    if (!truth.valid()) throw InvalidInput("truth labels must be 1 or 2");
    if (truth.size() != n_regular)
        throw InvalidInput("truth covers " + std::to_string(truth.size()) +
                           " agents, trajectory has " + std::to_string(n_regular));
    return truth;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Gossip opinion dynamics over two-community random graphs: "
                 "simulation and community detection from a single trajectory"};
    app.require_subcommand(1);

    // ---- sample-graph ----------------------------------------------------
    auto* sample_cmd = app.add_subcommand("sample-graph", "Sample a graph (or emit the karate club)");
    GraphSpec sample_spec;
    add_graph_spec_options(sample_cmd, sample_spec);
    bool sample_karate = false;
    std::uint64_t sample_seed = 0;
    std::string sample_out = "-", sample_format = "json", sample_z;
    sample_cmd->add_flag("--karate", sample_karate, "Emit the built-in karate club graph");
    sample_cmd->add_option("--z", sample_z, "Stubborn opinions, comma separated");
    sample_cmd->add_option("--seed", sample_seed, "Random seed");
    sample_cmd->add_option("--out", sample_out, "Output path, '-' for stdout");
    sample_cmd->add_option("--format", sample_format, "Output format")
        ->check(CLI::IsMember({"json", "edgelist"}));

    // ---- simulate --------------------------------------------------------
    auto* sim_cmd = app.add_subcommand("simulate", "Run the gossip process and record snapshots");
    std::string sim_graph, sim_out = "-", sim_z, sim_x0_file;
    bool sim_karate = false;
    long sim_horizon = 0, sim_record_every = 0;
    std::vector<long> sim_record;
    std::vector<double> sim_uniform, sim_communities;
    std::uint64_t sim_seed = 0;
    std::optional<double> sim_bound;
    sim_cmd->add_option("--graph", sim_graph, "Graph file (.json or edge list)");
    sim_cmd->add_flag("--karate", sim_karate, "Use the built-in karate club graph");
    sim_cmd->add_option("--horizon", sim_horizon, "Number of steps")->required();
    sim_cmd->add_option("--record", sim_record, "Steps to record (repeatable)");
    sim_cmd->add_option("--record-every", sim_record_every,
                        "Record every k-th step (plus 0 and the horizon)");
    sim_cmd->add_option("--init-uniform", sim_uniform,
                        "Draw initial opinions uniformly from [lo, hi]")
        ->expected(2);
    sim_cmd->add_option("--init-communities", sim_communities,
                        "Per-community uniform ranges lo1 hi1 lo2 hi2")
        ->expected(4);
    sim_cmd->add_option("--x0", sim_x0_file, "JSON array of initial opinions");
    sim_cmd->add_option("--z", sim_z, "Stubborn opinions override, comma separated");
    sim_cmd->add_option("--bound", store_double(sim_bound),
                        "Declared opinion bound; inputs outside it are rejected");
    sim_cmd->add_option("--seed", sim_seed, "Random seed");
    sim_cmd->add_option("--out", sim_out, "Trajectory CSV path, '-' for stdout");

    // ---- detect ------------------------------------------------------
    auto* detect_cmd = app.add_subcommand("detect", "Detect communities from a recorded trajectory");
    std::string detect_traj, detect_algorithm = "transient", detect_truth, detect_out = "-";
    long detect_step = -1, detect_stride = 0;
    int detect_network_size = 0;
    double detect_threshold = 0.0;
    bool detect_adaptive = false;
    std::optional<double> detect_p_within, detect_p_between;
    detect_cmd->add_option("--trajectory", detect_traj, "Trajectory CSV")->required();
    detect_cmd->add_option("--algorithm", detect_algorithm,
                           "transient (cluster X(t)) or average (cluster S(T))");
    detect_cmd->add_option("--step", detect_step, "Clustering step (t or T)");
    detect_cmd->add_option("--network-size", detect_network_size,
                           "Network size n, used for the default step round(n log n)");
    detect_cmd->add_option("--p-within", store_double(detect_p_within),
                           "Within-community link probability, enables the step-window check");
    detect_cmd->add_option("--p-between", store_double(detect_p_between),
                           "Between-community link probability, enables the step-window check");
    detect_cmd->add_flag("--adaptive", detect_adaptive,
                         "Recluster the state average until the estimate settles");
    detect_cmd->add_option("--threshold", detect_threshold,
                           "Adaptive mode: acceptable label-change fraction");
    detect_cmd->add_option("--stride", detect_stride, "Adaptive mode: check interval in steps");
    detect_cmd->add_option("--truth", detect_truth,
                           "Ground truth: 'canonical', 'karate', or a labels JSON file");
    detect_cmd->add_option("--out", detect_out, "Detection JSON path, '-' for stdout");

    // ---- oracle ------------------------------------------------------
    auto* oracle_cmd = app.add_subcommand(
        "oracle", "Expected update matrices and expected final opinions");
    GraphSpec oracle_spec;
    add_graph_spec_options(oracle_cmd, oracle_spec);
    std::string oracle_graph, oracle_out = "-", oracle_z;
    bool oracle_karate = false, oracle_averaged = false, oracle_no_solve = false;
    oracle_cmd->add_option("--graph", oracle_graph, "Graph file (.json or edge list)");
    oracle_cmd->add_flag("--karate", oracle_karate, "Use the built-in karate club graph");
    oracle_cmd->add_flag("--averaged", oracle_averaged,
                         "Use the averaged graph of the given parameters instead of a sample");
    oracle_cmd->add_option("--z", oracle_z, "Stubborn opinions, comma separated");
    oracle_cmd->add_flag("--no-solve", oracle_no_solve, "Skip the expected final opinions");
    oracle_cmd->add_option("--out", oracle_out, "Oracle JSON path, '-' for stdout");

    // ---- experiment ----------------------------------------------------
    auto* experiment_cmd = app.add_subcommand("experiment", "Run a built-in or custom sweep");
    std::string experiment_name, experiment_out, experiment_config_path;
    std::uint64_t experiment_seed = 0;
    int experiment_parallelism = 1;
    bool experiment_full = false;
    std::vector<double> experiment_thresholds{0.8, 0.9, 0.95, 1.0};
    experiment_cmd->add_option("preset", experiment_name, "fig2 | fig3 | karate | custom")
        ->required()
        ->check(CLI::IsMember({"fig2", "fig3", "karate", "custom"}));
    experiment_cmd->add_option("--config", experiment_config_path,
                               "Experiment config JSON (required for custom)");
    experiment_cmd->add_option("--seed", experiment_seed, "Master seed");
    experiment_cmd->add_option("--out", experiment_out, "Records CSV path")->required();
    experiment_cmd->add_option("--parallelism", experiment_parallelism, "Worker count")
        ->check(CLI::PositiveNumber);
    experiment_cmd->add_flag("--full", experiment_full,
                             "Include sweep points above the desk-scale cap (n = 2000)");
    experiment_cmd->add_option("--thresholds", experiment_thresholds,
                               "Accuracy thresholds for the summary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // invalid usage is exit code 1
    }

    // ---- dispatch --------------------------------------------------------
    if (sample_cmd->parsed()) {
        if (sample_karate) {
            const auto club = karate_club();
            write_output(sample_out, [&](std::ostream& out) {
                if (sample_format == "json")
                    write_graph_json(out, club.graph, club.stubborn_opinions);
                else
                    write_edge_list(out, club.graph);
            });
            return 0;
        }
        const SbmSParams params = sample_spec.resolve();
        for (const auto& warning : params.validate()) std::cerr << "warning: " << warning << '\n';
        Rng rng = make_rng(sample_seed);
        const SampledGraph graph = sample_sbm_s(params, rng);
        const Eigen::VectorXd z =
            sample_z.empty() ? signed_halves(graph.n_stubborn()) : parse_double_list(sample_z);
        if (z.size() != graph.n_stubborn())
            throw InvalidInput("--z length does not match the stubborn agent count");
        write_output(sample_out, [&](std::ostream& out) {
            if (sample_format == "json")
                write_graph_json(out, graph, z);
            else
                write_edge_list(out, graph);
        });
        return 0;
    }

    if (sim_cmd->parsed()) {
        GraphBundle bundle = load_graph(sim_graph, sim_karate);
        if (!sim_z.empty()) bundle.stubborn_opinions = parse_double_list(sim_z);

        Eigen::VectorXd x0;
        Rng rng = make_rng(sim_seed);
        if (!sim_x0_file.empty()) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(slurp_file(sim_x0_file));
            } catch (const nlohmann::json::exception& e) {
                throw InvalidInput(std::string("malformed x0 JSON: ") + e.what());
            }
            x0.resize(static_cast<long>(j.size()));
            for (long i = 0; i < x0.size(); ++i) x0(i) = j[static_cast<std::size_t>(i)].get<double>();
        } else if (!sim_communities.empty()) {
            const auto truth = CommunityStructure::canonical(bundle.graph.n_regular());
            x0.resize(bundle.graph.n_regular());
            for (int i = 0; i < bundle.graph.n_regular(); ++i) {
                const bool first = truth.labels[static_cast<std::size_t>(i)] == 1;
                const double lo = first ? sim_communities[0] : sim_communities[2];
                const double hi = first ? sim_communities[1] : sim_communities[3];
                x0(i) = lo + uniform01(rng) * (hi - lo);
            }
        } else {
            const double lo = sim_uniform.empty() ? -1.0 : sim_uniform[0];
            const double hi = sim_uniform.empty() ? 1.0 : sim_uniform[1];
            x0.resize(bundle.graph.n_regular());
            for (int i = 0; i < bundle.graph.n_regular(); ++i) x0(i) = lo + uniform01(rng) * (hi - lo);
        }

        SimulationOptions options;
        options.horizon = sim_horizon;
        options.record_steps = sim_record;
        options.opinion_bound = sim_bound;
        if (sim_record_every > 0)
            for (long t = 0; t <= sim_horizon; t += sim_record_every)
                options.record_steps.push_back(t);
        if (options.record_steps.empty()) options.record_steps = {0, sim_horizon};
        options.record_steps.push_back(sim_horizon);

        const Trajectory trajectory =
            simulate(bundle.graph, x0, bundle.stubborn_opinions, options, rng);
        write_output(sim_out, [&](std::ostream& out) { write_trajectory_csv(out, trajectory); });
        return 0;
    }

    if (detect_cmd->parsed()) {
        std::ifstream in(detect_traj);
        if (!in) throw InvalidInput("cannot open trajectory '" + detect_traj + "'");
        const Trajectory trajectory = read_trajectory_csv(in);

        std::optional<CommunityStructure> truth;
        if (!detect_truth.empty()) truth = load_truth(detect_truth, trajectory.n_regular());

        DetectionResult result;
        long step_used = 0;
        std::vector<std::string> warnings;

        if (detect_adaptive) {
            if (detect_stride < 1) throw InvalidInput("adaptive mode needs --stride >= 1");
            const auto adaptive = adaptive_time_average(trajectory, detect_threshold, detect_stride);
            result = adaptive.result;
            step_used = adaptive.chosen_step;
            if (!adaptive.converged)
                warnings.push_back("estimate did not settle within the recorded trajectory");
        } else if (algorithm_from_name(detect_algorithm) == DetectionAlgorithm::transient_state) {
            TransientDetectionOptions options;
            if (detect_step >= 0) options.step_override = detect_step;
            options.p_within = detect_p_within;
            options.p_between = detect_p_between;
            const int n = detect_network_size > 0 ? detect_network_size : trajectory.n_regular();
            const auto detection = detect_transient(trajectory, n, options);
            result = detection.result;
            step_used = detection.step_used;
            if (detection.window_warning) warnings.push_back(*detection.window_warning);
        } else {
            if (detect_step < 1)
                throw InvalidInput("time-average detection needs --step >= 1");
            result = detect_time_average(trajectory, detect_step);
            step_used = detect_step;
        }

        std::optional<double> accuracy_value;
        if (truth) accuracy_value = accuracy(*truth, result.labels);
        for (const auto& warning : warnings) std::cerr << "warning: " << warning << '\n';
        write_output(detect_out, [&](std::ostream& out) {
            write_detection_json(out, result, step_used, accuracy_value, warnings);
        });
        return 0;
    }

    if (oracle_cmd->parsed()) {
        ExpectedDynamics dynamics;
        Eigen::VectorXd z;
        if (oracle_averaged) {
            const SbmSParams params = oracle_spec.resolve();
            for (const auto& warning : params.validate())
                std::cerr << "warning: " << warning << '\n';
            dynamics = expected_update_matrices(averaged_graph(params));
            z = signed_halves(params.n_stubborn);
        } else {
            const GraphBundle bundle = load_graph(oracle_graph, oracle_karate);
            dynamics = expected_update_matrices(bundle.graph);
            z = bundle.stubborn_opinions;
        }
        if (!oracle_z.empty()) z = parse_double_list(oracle_z);
        if (z.size() != dynamics.n_stubborn())
            throw InvalidInput("--z length does not match the stubborn agent count");

        std::optional<Eigen::VectorXd> final_opinions;
        if (!oracle_no_solve && dynamics.n_stubborn() > 0)
            final_opinions = expected_final_opinions(dynamics, z);
        write_output(oracle_out, [&](std::ostream& out) {
            write_expected_dynamics_json(out, dynamics, final_opinions);
        });
        return 0;
    }

    if (experiment_cmd->parsed()) {
        ExperimentConfig config;
        if (experiment_name == "fig2") {
            config = fig2_config();
        } else if (experiment_name == "fig3") {
            config = fig3_config();
        } else if (experiment_name == "karate") {
            config = karate_config();
        } else {
            if (experiment_config_path.empty())
                throw InvalidInput("custom experiments need --config <json-path>");
            std::istringstream stream(slurp_file(experiment_config_path));
            config = read_experiment_config_json(stream);
        }
        config.master_seed = experiment_seed;

        RunOptions options;
        options.parallelism = experiment_parallelism;
        options.full_sweep = experiment_full;

        const ExperimentResult result = run_experiment(config, options);
        for (const auto& warning : result.warnings) std::cerr << "warning: " << warning << '\n';

        write_output(experiment_out,
                     [&](std::ostream& out) { write_records_csv(out, result.records); });

        std::filesystem::path summary_path(experiment_out);
        summary_path.replace_extension();
        summary_path += ".summary.json";
        write_output(summary_path.string(), [&](std::ostream& out) {
            write_summary_json(out, config, result, experiment_thresholds);
        });

        for (const auto& row : summarize(result.records, experiment_thresholds)) {
            std::cerr << "n=" << row.n << ' ' << algorithm_name(row.algorithm)
                      << " runs=" << row.runs << " failures=" << row.failures
                      << " mean_accuracy=" << row.mean_accuracy << '\n';
        }
        std::cerr << "wrote " << result.records.size() << " records to " << experiment_out
                  << " (summary: " << summary_path.string() << ") in " << result.wall_seconds
                  << "s\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

#include "gossipdet/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <map>

#include "json.hpp"

#include "gossipdet/errors.hpp"

namespace gossipdet {

namespace {

using json = nlohmann::ordered_json;

// Shortest representation that round-trips exactly.
std::string dtos(double value) {
    if (std::isnan(value)) return "nan";
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) throw Error("failed to format a double");
    return std::string(buffer, ptr);
}

double stod_strict(std::string_view text, const char* what) {
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw InvalidInput(std::string("malformed ") + what + ": '" + std::string(text) + "'");
    return value;
}

long stol_strict(std::string_view text, const char* what) {
    long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw InvalidInput(std::string("malformed ") + what + ": '" + std::string(text) + "'");
    return value;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

json parse_json(std::istream& in, const char* what) {
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed ") + what + " JSON: " + e.what());
    }
}

json schedule_to_json(const Schedule& schedule) {
    return json{{"coeff", schedule.coeff}, {"log_exp", schedule.log_exp}, {"n_exp", schedule.n_exp}};
}

Schedule schedule_from_json(const json& j, const char* what) {
    if (!j.is_object()) throw InvalidInput(std::string("schedule '") + what + "' must be an object");
    Schedule schedule;
    schedule.coeff = j.value("coeff", 1.0);
    schedule.log_exp = j.value("log_exp", 0.0);
    schedule.n_exp = j.value("n_exp", 0.0);
    return schedule;
}

}  // namespace

void write_graph_json(std::ostream& out, const SampledGraph& graph,
                      const Eigen::VectorXd& stubborn_opinions) {
    if (stubborn_opinions.size() != graph.n_stubborn())
        throw ContractViolation("stubborn opinion vector length does not match the graph");
    json j;
    j["n_r"] = graph.n_regular();
    j["n_s"] = graph.n_stubborn();
    auto& edges = j["edges"] = json::array();
    for (const auto& [a, b] : graph.edges()) edges.push_back(json::array({a + 1, b + 1}));
    auto& opinions = j["stubborn_opinions"] = json::array();
    for (int i = 0; i < stubborn_opinions.size(); ++i) opinions.push_back(stubborn_opinions(i));
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed to write graph JSON");
}

GraphBundle read_graph_json(std::istream& in) {
    const json j = parse_json(in, "graph");
    if (!j.contains("n_r") || !j.contains("n_s") || !j.contains("edges"))
        throw InvalidInput("graph JSON needs n_r, n_s and edges");
    const int n_regular = j.at("n_r").get<int>();
    const int n_stubborn = j.at("n_s").get<int>();
    std::vector<Edge> edges;
    for (const auto& pair : j.at("edges")) {
        if (!pair.is_array() || pair.size() != 2)
            throw InvalidInput("each edge must be a pair of 1-based agent ids");
        edges.emplace_back(pair[0].get<int>() - 1, pair[1].get<int>() - 1);
    }
    Eigen::VectorXd opinions = Eigen::VectorXd::Zero(n_stubborn);
    if (j.contains("stubborn_opinions")) {
        const auto& array = j.at("stubborn_opinions");
        if (static_cast<int>(array.size()) != n_stubborn)
            throw InvalidInput("stubborn_opinions length does not match n_s");
        for (int i = 0; i < n_stubborn; ++i) opinions(i) = array[static_cast<std::size_t>(i)].get<double>();
    }
    return {SampledGraph(n_regular, n_stubborn, std::move(edges)), std::move(opinions)};
}

void write_edge_list(std::ostream& out, const SampledGraph& graph) {
    out << "# n_r=" << graph.n_regular() << " n_s=" << graph.n_stubborn() << '\n';
    for (const auto& [a, b] : graph.edges()) out << a + 1 << ' ' << b + 1 << '\n';
    if (!out) throw IoError("failed to write edge list");
}

SampledGraph read_edge_list(std::istream& in) {
    std::vector<Edge> edges;
    int n_regular = -1, n_stubborn = 0, max_node = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t pos = line.find("n_r=");
            if (pos != std::string::npos) n_regular = static_cast<int>(stol_strict(
                std::string_view(line).substr(pos + 4, line.find(' ', pos) - pos - 4), "n_r"));
            pos = line.find("n_s=");
            if (pos != std::string::npos) n_stubborn = static_cast<int>(
                stol_strict(std::string_view(line).substr(pos + 4), "n_s"));
            continue;
        }
        std::istringstream fields(line);
        int a = 0, b = 0;
        if (!(fields >> a >> b)) throw InvalidInput("malformed edge list line: '" + line + "'");
        edges.emplace_back(a - 1, b - 1);
        max_node = std::max({max_node, a, b});
    }
    if (n_regular < 0) n_regular = max_node;  // no header: all agents regular
    return SampledGraph(n_regular, n_stubborn, std::move(edges));
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    out << "t,agent_index,value,kind\n";
    for (long step : trajectory.steps()) {
        const Eigen::VectorXd& state = trajectory.state_at(step);
        const Eigen::VectorXd& average = trajectory.average_at(step);
        for (int i = 0; i < state.size(); ++i)
            out << step << ',' << i + 1 << ',' << dtos(state(i)) << ",state\n";
        for (int i = 0; i < average.size(); ++i)
            out << step << ',' << i + 1 << ',' << dtos(average(i)) << ",average\n";
    }
    if (!out) throw IoError("failed to write trajectory CSV");
}

Trajectory read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "t,agent_index,value,kind")
        throw InvalidInput("trajectory CSV must start with 't,agent_index,value,kind'");

    struct Snapshot {
        std::vector<double> state, average;
    };
    std::map<long, Snapshot> snapshots;
    int n_regular = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 4) throw InvalidInput("malformed trajectory row: '" + line + "'");
        const long step = stol_strict(fields[0], "step");
        const int agent = static_cast<int>(stol_strict(fields[1], "agent index"));
        const double value = stod_strict(fields[2], "value");
        if (agent < 1) throw InvalidInput("agent indices are 1-based");
        n_regular = std::max(n_regular, agent);
        auto& snapshot = snapshots[step];
        auto& column = fields[3] == "state" ? snapshot.state
                       : fields[3] == "average"
                           ? snapshot.average
                           : throw InvalidInput("trajectory kind must be state or average");
        if (static_cast<std::size_t>(agent) > column.size()) column.resize(static_cast<std::size_t>(agent));
        column[static_cast<std::size_t>(agent - 1)] = value;
    }
    if (snapshots.empty()) throw InvalidInput("trajectory CSV holds no snapshots");

    Trajectory trajectory(n_regular, snapshots.rbegin()->first);
    for (auto& [step, snapshot] : snapshots) {
        if (static_cast<int>(snapshot.state.size()) != n_regular ||
            static_cast<int>(snapshot.average.size()) != n_regular)
            throw InvalidInput("trajectory step " + std::to_string(step) +
                               " does not cover every agent in both kinds");
        trajectory.add_snapshot(step,
                                Eigen::Map<Eigen::VectorXd>(snapshot.state.data(), n_regular),
                                Eigen::Map<Eigen::VectorXd>(snapshot.average.data(), n_regular));
    }
    return trajectory;
}

void write_detection_json(std::ostream& out, const DetectionResult& result, long step_used,
                          std::optional<double> accuracy_value,
                          const std::vector<std::string>& warnings) {
    json j;
    j["labels"] = result.labels.labels;
    j["split_value"] = result.split_value;
    j["cost"] = result.cost;
    j["t_used"] = step_used;
    if (accuracy_value) j["accuracy"] = *accuracy_value;
    if (!warnings.empty()) j["warnings"] = warnings;
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed to write detection JSON");
}

void write_expected_dynamics_json(std::ostream& out, const ExpectedDynamics& dynamics,
                                  const std::optional<Eigen::VectorXd>& final_opinions) {
    json j;
    j["n_regular"] = dynamics.n_regular();
    j["n_stubborn"] = dynamics.n_stubborn();
    j["source"] = dynamics.source == ExpectedDynamics::Source::sampled_graph ? "sampled" : "averaged";
    auto matrix_to_json = [](const Eigen::MatrixXd& m) {
        json rows = json::array();
        for (int i = 0; i < m.rows(); ++i) {
            json row = json::array();
            for (int c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    j["expected_q"] = matrix_to_json(dynamics.expected_q);
    j["expected_r"] = matrix_to_json(dynamics.expected_r);
    if (final_opinions) {
        json x = json::array();
        for (int i = 0; i < final_opinions->size(); ++i) x.push_back((*final_opinions)(i));
        j["expected_final_opinions"] = std::move(x);
    }
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed to write oracle JSON");
}

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    out << "n,graph_sample,trajectory,algorithm,detection_step,accuracy\n";
    for (const auto& record : records) {
        out << record.n << ',' << record.graph_sample << ',' << record.trajectory << ','
            << algorithm_name(record.algorithm) << ',' << record.detection_step << ','
            << dtos(record.accuracy) << '\n';
    }
    if (!out) throw IoError("failed to write records CSV");
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "n,graph_sample,trajectory,algorithm,detection_step,accuracy")
        throw InvalidInput("records CSV header mismatch");
    std::vector<RunRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 6) throw InvalidInput("malformed record row: '" + line + "'");
        RunRecord record;
        record.n = stol_strict(fields[0], "n");
        record.graph_sample = static_cast<int>(stol_strict(fields[1], "graph sample"));
        record.trajectory = static_cast<int>(stol_strict(fields[2], "trajectory"));
        record.algorithm = algorithm_from_name(std::string(fields[3]));
        record.detection_step = stol_strict(fields[4], "detection step");
        record.accuracy = stod_strict(fields[5], "accuracy");
        records.push_back(std::move(record));
    }
    return records;
}

void write_summary_json(std::ostream& out, const ExperimentConfig& config,
                        const ExperimentResult& result, const std::vector<double>& thresholds) {
    json j;
    j["experiment"] = config.name;
    j["master_seed"] = config.master_seed;
    j["n_records"] = result.records.size();
    j["thresholds"] = thresholds;

    auto& rows = j["rows"] = json::array();
    for (const auto& row : summarize(result.records, thresholds)) {
        json r;
        r["n"] = row.n;
        r["algorithm"] = algorithm_name(row.algorithm);
        r["runs"] = row.runs;
        r["failures"] = row.failures;
        r["mean_accuracy"] = row.mean_accuracy;
        json p;
        for (std::size_t i = 0; i < thresholds.size(); ++i) p[dtos(thresholds[i])] = row.p_at_least[i];
        r["p_at_least"] = std::move(p);
        rows.push_back(std::move(r));
    }

    if (config.record_every_step) {
        auto& curves = j["per_step"] = json::array();
        for (const auto& point : per_step_curves(result.records)) {
            curves.push_back(json{{"algorithm", algorithm_name(point.algorithm)},
                                  {"step", point.step},
                                  {"mean_accuracy", point.mean_accuracy}});
        }
    }

    j["warnings"] = result.warnings;
    j["wall_clock_seconds"] = result.wall_seconds;
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed to write summary JSON");
}

ExperimentConfig read_experiment_config_json(std::istream& in) {
    const json j = parse_json(in, "experiment config");
    ExperimentConfig config;
    config.name = j.value("name", std::string("custom"));
    if (!j.contains("n_values") || !j.at("n_values").is_array() || j.at("n_values").empty())
        throw InvalidInput("experiment config needs a nonempty n_values array");
    for (const auto& n : j.at("n_values")) config.n_values.push_back(n.get<long>());
    config.regular_fraction = j.value("r0", 0.9);
    if (j.contains("p_within")) config.p_within = schedule_from_json(j.at("p_within"), "p_within");
    if (j.contains("p_between")) config.p_between = schedule_from_json(j.at("p_between"), "p_between");
    if (j.contains("p_stubborn"))
        config.p_stubborn = schedule_from_json(j.at("p_stubborn"), "p_stubborn");
    if (j.contains("detection_step"))
        config.detection_step = schedule_from_json(j.at("detection_step"), "detection_step");
    if (j.contains("algorithms")) {
        for (const auto& name : j.at("algorithms"))
            config.algorithms.push_back(algorithm_from_name(name.get<std::string>()));
    } else {
        config.algorithms = {DetectionAlgorithm::transient_state};
    }
    config.record_every_step = j.value("record_every_step", false);
    config.fixed_horizon = j.value("fixed_horizon", 0l);
    config.use_karate_graph = j.value("use_karate_graph", false);
    config.graph_samples = j.value("graph_samples", 20);
    config.trajectories_per_graph = j.value("trajectories_per_graph", 20);
    config.master_seed = j.value("master_seed", std::uint64_t{0});
    if (j.contains("init")) {
        const auto& init = j.at("init");
        const std::string kind = init.value("kind", std::string("uniform"));
        if (kind == "uniform") {
            config.init.kind = InitSpec::Kind::uniform;
            config.init.low = init.value("low", -1.0);
            config.init.high = init.value("high", 1.0);
        } else if (kind == "per_community") {
            config.init.kind = InitSpec::Kind::per_community;
            config.init.low1 = init.value("low1", -1.0);
            config.init.high1 = init.value("high1", 0.0);
            config.init.low2 = init.value("low2", 0.0);
            config.init.high2 = init.value("high2", 1.0);
        } else {
            throw InvalidInput("init kind must be uniform or per_community");
        }
    }
    return config;
}

void write_experiment_config_json(std::ostream& out, const ExperimentConfig& config) {
    json j;
    j["name"] = config.name;
    j["n_values"] = config.n_values;
    j["r0"] = config.regular_fraction;
    j["p_within"] = schedule_to_json(config.p_within);
    j["p_between"] = schedule_to_json(config.p_between);
    j["p_stubborn"] = schedule_to_json(config.p_stubborn);
    j["detection_step"] = schedule_to_json(config.detection_step);
    auto& algorithms = j["algorithms"] = json::array();
    for (DetectionAlgorithm algorithm : config.algorithms) algorithms.push_back(algorithm_name(algorithm));
    j["record_every_step"] = config.record_every_step;
    j["fixed_horizon"] = config.fixed_horizon;
    j["use_karate_graph"] = config.use_karate_graph;
    j["graph_samples"] = config.graph_samples;
    j["trajectories_per_graph"] = config.trajectories_per_graph;
    j["master_seed"] = config.master_seed;
    json init;
    if (config.init.kind == InitSpec::Kind::uniform) {
        init["kind"] = "uniform";
        init["low"] = config.init.low;
        init["high"] = config.init.high;
    } else {
        init["kind"] = "per_community";
        init["low1"] = config.init.low1;
        init["high1"] = config.init.high1;
        init["low2"] = config.init.low2;
        init["high2"] = config.init.high2;
    }
    j["init"] = std::move(init);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed to write experiment config JSON");
}

std::string slurp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open '" + path + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

void spit_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << contents;
    if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace gossipdet

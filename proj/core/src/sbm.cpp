#include "gossipdet/sbm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gossipdet/errors.hpp"

namespace gossipdet {

namespace {

constexpr double kUniformityTol = 1e-12;

bool is_probability(double p) { return p >= 0.0 && p <= 1.0 && std::isfinite(p); }

void check_probability(double p, const char* name, std::vector<std::string>& warnings) {
    if (!is_probability(p)) {
        std::ostringstream msg;
        msg << name << " = " << p << " is outside [0, 1]";
        throw InvalidInput(msg.str());
    }
    if (p == 0.0 || p == 1.0) {
        std::ostringstream msg;
        msg << name << " = " << p << " is a boundary probability; the model expects (0, 1)";
        warnings.push_back(msg.str());
    }
}

// Community of a regular agent under the canonical labeling.
int community_of(int agent, int n_regular) {
    return agent < (n_regular + 1) / 2 ? 1 : 2;
}

void sample_regular_block(int n_regular, double p_within, double p_between,
                          std::vector<Edge>& edges, Rng& rng) {
    for (int i = 0; i < n_regular; ++i) {
        for (int j = i + 1; j < n_regular; ++j) {
            const double p =
                community_of(i, n_regular) == community_of(j, n_regular) ? p_within : p_between;
            if (p > 0.0 && uniform01(rng) < p) edges.emplace_back(i, j);
        }
    }
}

}  // namespace

CommunityStructure CommunityStructure::canonical(int n_regular) {
    if (n_regular < 0) throw InvalidInput("negative number of regular agents");
    CommunityStructure c;
    c.labels.resize(static_cast<std::size_t>(n_regular));
    for (int i = 0; i < n_regular; ++i) c.labels[static_cast<std::size_t>(i)] = community_of(i, n_regular);
    return c;
}

bool CommunityStructure::valid() const noexcept {
    return std::all_of(labels.begin(), labels.end(), [](int l) { return l == 1 || l == 2; });
}

std::vector<std::string> SbmSParams::validate() const {
    std::vector<std::string> warnings;
    if (n_regular < 2) throw InvalidInput("need at least two regular agents");
    if (n_stubborn < 0) throw InvalidInput("negative number of stubborn agents");
    check_probability(p_within, "p_within", warnings);
    check_probability(p_between, "p_between", warnings);
    if (stubborn_links.rows() != n_regular || stubborn_links.cols() != n_stubborn) {
        std::ostringstream msg;
        msg << "stubborn_links is " << stubborn_links.rows() << "x" << stubborn_links.cols()
            << ", expected " << n_regular << "x" << n_stubborn;
        throw InvalidInput(msg.str());
    }
    bool boundary_link = false;
    for (int i = 0; i < n_regular; ++i) {
        for (int j = 0; j < n_stubborn; ++j) {
            const double p = stubborn_links(i, j);
            if (!is_probability(p)) {
                std::ostringstream msg;
                msg << "stubborn_links(" << i + 1 << "," << j + 1 << ") = " << p
                    << " is outside [0, 1]";
                throw InvalidInput(msg.str());
            }
            boundary_link = boundary_link || p == 1.0;
        }
    }
    if (boundary_link)
        warnings.emplace_back("stubborn_links contains probability 1; the model expects [0, 1)");
    return warnings;
}

SampledGraph::SampledGraph(int n_regular, int n_stubborn, std::vector<Edge> edges)
    : n_regular_(n_regular), n_stubborn_(n_stubborn), edges_(std::move(edges)) {
    if (n_regular_ < 0 || n_stubborn_ < 0) throw InvalidInput("negative agent count");
    const int n = n_total();
    adjacency_.assign(static_cast<std::size_t>(n), {});
    for (auto& e : edges_) {
        if (e.first > e.second) std::swap(e.first, e.second);
        if (e.first < 0 || e.second >= n) throw InvalidInput("edge endpoint out of range");
        if (e.first == e.second) throw InvalidInput("self-loops are not allowed");
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
        throw InvalidInput("duplicate edge in edge list");
    for (const auto& [a, b] : edges_) {
        adjacency_[static_cast<std::size_t>(a)].push_back(b);
        adjacency_[static_cast<std::size_t>(b)].push_back(a);
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

bool SampledGraph::has_edge(int a, int b) const {
    if (a < 0 || b < 0 || a >= n_total() || b >= n_total() || a == b) return false;
    const auto& nbrs = adjacency_[static_cast<std::size_t>(a)];
    return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

Eigen::MatrixXd SampledGraph::dense_adjacency() const {
    const int n = n_total();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [i, j] : edges_) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
    }
    return a;
}

SampledGraph sample_sbm(int n, double p_within, double p_between, Rng& rng) {
    if (n < 2) throw InvalidInput("need at least two agents");
    if (n % 2 != 0) throw InvalidInput("plain block-model sampling requires an even agent count");
    std::vector<std::string> warnings;
    check_probability(p_within, "p_within", warnings);
    check_probability(p_between, "p_between", warnings);
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n));
    sample_regular_block(n, p_within, p_between, edges, rng);
    return SampledGraph(n, 0, std::move(edges));
}

SampledGraph sample_sbm_s(const SbmSParams& params, Rng& rng) {
    params.validate();
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(params.n_regular));
    sample_regular_block(params.n_regular, params.p_within, params.p_between, edges, rng);
    for (int i = 0; i < params.n_regular; ++i) {
        for (int j = 0; j < params.n_stubborn; ++j) {
            const double p = params.stubborn_links(i, j);
            if (p > 0.0 && uniform01(rng) < p) edges.emplace_back(i, params.n_regular + j);
        }
    }
    return SampledGraph(params.n_regular, params.n_stubborn, std::move(edges));
}

AveragedGraph averaged_graph(const SbmSParams& params) {
    params.validate();
    const int n = params.n_total();
    AveragedGraph avg;
    avg.n_regular = params.n_regular;
    avg.n_stubborn = params.n_stubborn;
    avg.weights = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < params.n_regular; ++i) {
        for (int j = i + 1; j < params.n_regular; ++j) {
            const double w = community_of(i, params.n_regular) == community_of(j, params.n_regular)
                                 ? params.p_within
                                 : params.p_between;
            avg.weights(i, j) = w;
            avg.weights(j, i) = w;
        }
        for (int j = 0; j < params.n_stubborn; ++j) {
            const double w = params.stubborn_links(i, j);
            avg.weights(i, params.n_regular + j) = w;
            avg.weights(params.n_regular + j, i) = w;
        }
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) total += avg.weights(i, j);
    avg.expected_edge_count = total;
    return avg;
}

StubbornInfluence stubborn_influence_row_sums(const SbmSParams& params) {
    params.validate();
    StubbornInfluence result;
    result.row_sums = params.n_stubborn == 0
                          ? Eigen::VectorXd::Zero(params.n_regular).eval()
                          : params.stubborn_links.rowwise().sum().eval();
    const double first = result.row_sums(0);
    result.uniform = ((result.row_sums.array() - first).abs() <= kUniformityTol).all();
    if (result.uniform) result.common_value = first;
    return result;
}

BlockInfluenceCheck check_block_influence(const SbmSParams& params,
                                          const Eigen::VectorXd& stubborn_opinions) {
    params.validate();
    if (stubborn_opinions.size() != params.n_stubborn)
        throw ContractViolation("stubborn opinion vector length does not match n_stubborn");

    const Eigen::VectorXd influence = params.n_stubborn == 0
                                          ? Eigen::VectorXd::Zero(params.n_regular).eval()
                                          : (params.stubborn_links * stubborn_opinions).eval();
    const int split = (params.n_regular + 1) / 2;
    BlockInfluenceCheck check;

    auto block_value = [&](int begin, int end) -> std::optional<double> {
        const double v = influence(begin);
        for (int i = begin; i < end; ++i)
            if (std::abs(influence(i) - v) > kUniformityTol) return std::nullopt;
        return v;
    };
    check.community1_value = block_value(0, split);
    check.community2_value = block_value(split, params.n_regular);

    if (!check.community1_value || !check.community2_value) {
        check.violation = "weighted stubborn influence is not constant within a community";
        return check;
    }
    if (std::abs(*check.community1_value - *check.community2_value) <= kUniformityTol) {
        std::ostringstream msg;
        msg << "both communities receive the same weighted stubborn influence ("
            << *check.community1_value << ")";
        check.violation = msg.str();
        return check;
    }
    check.holds = true;
    return check;
}

Eigen::MatrixXd block_stubborn_links(int n_regular, int n_stubborn, double p) {
    if (n_regular < 0 || n_stubborn < 0) throw InvalidInput("negative agent count");
    if (!is_probability(p)) throw InvalidInput("block link probability outside [0, 1]");
    Eigen::MatrixXd links = Eigen::MatrixXd::Zero(n_regular, n_stubborn);
    const int regular_split = (n_regular + 1) / 2;
    const int stubborn_split = (n_stubborn + 1) / 2;
    links.topLeftCorner(regular_split, stubborn_split).setConstant(p);
    links.bottomRightCorner(n_regular - regular_split, n_stubborn - stubborn_split).setConstant(p);
    return links;
}

}  // namespace gossipdet

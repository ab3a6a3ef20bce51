#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "gossipdet/errors.hpp"
#include "gossipdet/sbm.hpp"

using namespace gossipdet;

namespace {

SbmSParams small_params(int n_regular, int n_stubborn, double p_within, double p_between,
                        double p_stubborn_link) {
    SbmSParams params;
    params.n_regular = n_regular;
    params.n_stubborn = n_stubborn;
    params.p_within = p_within;
    params.p_between = p_between;
    params.stubborn_links =
        Eigen::MatrixXd::Constant(n_regular, n_stubborn, p_stubborn_link);
    return params;
}

}  // namespace

TEST_CASE("canonical community structure splits at the ceiling") {
    const auto even = CommunityStructure::canonical(4);
    CHECK(even.labels == std::vector<int>{1, 1, 2, 2});
    const auto odd = CommunityStructure::canonical(9);
    CHECK(std::count(odd.labels.begin(), odd.labels.end(), 1) == 5);
    CHECK(std::count(odd.labels.begin(), odd.labels.end(), 2) == 4);
    CHECK(odd.valid());
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(SbmSParams{}.validate(), InvalidInput);

    auto params = small_params(4, 2, 0.5, 0.25, 0.1);
    CHECK(params.validate().empty());

    SUBCASE("boundary probabilities warn but pass") {
        params.p_within = 1.0;
        CHECK_FALSE(params.validate().empty());
    }
    SUBCASE("probabilities outside [0,1] are rejected") {
        params.p_between = 1.5;
        CHECK_THROWS_AS(params.validate(), InvalidInput);
    }
    SUBCASE("negative stubborn link is rejected") {
        params.stubborn_links(1, 0) = -0.1;
        CHECK_THROWS_AS(params.validate(), InvalidInput);
    }
    SUBCASE("shape mismatch is rejected") {
        params.stubborn_links = Eigen::MatrixXd::Zero(3, 2);
        CHECK_THROWS_AS(params.validate(), InvalidInput);
    }
}

TEST_CASE("plain sampling rejects odd sizes and bad probabilities") {
    Rng rng = make_rng(1);
    CHECK_THROWS_AS(sample_sbm(5, 0.5, 0.5, rng), InvalidInput);
    CHECK_THROWS_AS(sample_sbm(4, -0.1, 0.5, rng), InvalidInput);
    CHECK_THROWS_AS(sample_sbm(4, 0.5, 1.5, rng), InvalidInput);
}

TEST_CASE("deterministic boundary fixtures") {
    Rng rng = make_rng(7);
    SUBCASE("n=2 with certain cross link") {
        const auto g = sample_sbm(2, 0.5, 1.0, rng);
        CHECK(g.edge_count() == 1);
        CHECK(g.has_edge(0, 1));
        CHECK(g.n_stubborn() == 0);
    }
    SUBCASE("n=4 with certain within and impossible cross links") {
        const auto g = sample_sbm(4, 1.0, 0.0, rng);
        CHECK(g.edge_count() == 2);
        CHECK(g.has_edge(0, 1));
        CHECK(g.has_edge(2, 3));
        CHECK_FALSE(g.has_edge(0, 2));
    }
    SUBCASE("certain stubborn links") {
        auto params = small_params(2, 1, 0.5, 0.5, 1.0);
        const auto g = sample_sbm_s(params, rng);
        CHECK(g.has_edge(0, 2));
        CHECK(g.has_edge(1, 2));
    }
    SUBCASE("zero stubborn links never appear") {
        auto params = small_params(4, 2, 0.5, 0.5, 0.0);
        for (int seed = 0; seed < 20; ++seed) {
            Rng r = make_rng(seed);
            const auto g = sample_sbm_s(params, r);
            for (int i = 0; i < 4; ++i)
                for (int j = 4; j < 6; ++j) CHECK_FALSE(g.has_edge(i, j));
        }
    }
}

TEST_CASE("sampled adjacency is symmetric with zero diagonal and no stubborn-stubborn edges") {
    for (int seed = 0; seed < 30; ++seed) {
        Rng rng = make_rng(seed);
        auto params = small_params(7, 3, 0.6, 0.2, 0.4);
        const auto g = sample_sbm_s(params, rng);
        const auto a = g.dense_adjacency();
        CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(a.diagonal().cwiseAbs().maxCoeff() == 0.0);
        CHECK(a.sum() == doctest::Approx(2.0 * static_cast<double>(g.edge_count())));
        for (const auto& [x, y] : g.edges()) {
            CHECK_FALSE((g.is_stubborn(x) && g.is_stubborn(y)));
            CHECK(x < y);
        }
    }
}

TEST_CASE("edge counts match the binomial moments") {
    // 1000 samples at n=100: within-community pairs 2*C(50,2) = 2450 at 0.5,
    // cross pairs 2500 at 0.1.
    const int samples = 1000;
    long within_total = 0, between_total = 0;
    Rng rng = make_rng(12345);
    for (int s = 0; s < samples; ++s) {
        const auto g = sample_sbm(100, 0.5, 0.1, rng);
        for (const auto& [a, b] : g.edges()) {
            const bool same = (a < 50) == (b < 50);
            (same ? within_total : between_total) += 1;
        }
    }
    const double within_mean = static_cast<double>(within_total) / samples;
    const double between_mean = static_cast<double>(between_total) / samples;
    const double within_sigma = std::sqrt(2450.0 * 0.5 * 0.5 / samples);
    const double between_sigma = std::sqrt(2500.0 * 0.1 * 0.9 / samples);
    CHECK(std::abs(within_mean - 1225.0) <= 4.0 * within_sigma);
    CHECK(std::abs(between_mean - 250.0) <= 4.0 * between_sigma);
}

TEST_CASE("block stubborn links give the expected stubborn degree") {
    // Each regular agent sees n_s/2 candidate stubborn neighbors at p.
    SbmSParams params;
    params.n_regular = 20;
    params.n_stubborn = 10;
    params.p_within = 0.5;
    params.p_between = 0.5;
    params.stubborn_links = block_stubborn_links(20, 10, 0.4);

    const int samples = 2000;
    long stubborn_edges = 0;
    Rng rng = make_rng(99);
    for (int s = 0; s < samples; ++s) {
        const auto g = sample_sbm_s(params, rng);
        for (const auto& [a, b] : g.edges()) stubborn_edges += g.is_stubborn(b);
    }
    const double per_agent = static_cast<double>(stubborn_edges) / samples / 20.0;
    const double expected = 0.4 * 5.0;
    const double sigma = std::sqrt(20.0 * 5.0 * 0.4 * 0.6 / samples) / 20.0;
    CHECK(std::abs(per_agent - expected) <= 4.0 * sigma);
}

TEST_CASE("averaged graph formula") {
    SUBCASE("two regular agents in different communities") {
        const auto avg = averaged_graph(small_params(2, 0, 0.3, 0.7, 0.0));
        CHECK(avg.weights(0, 1) == 0.7);
        CHECK(avg.weights(1, 0) == 0.7);
        CHECK(avg.weights(0, 0) == 0.0);
        CHECK(avg.expected_edge_count == 0.7);
    }
    SUBCASE("uniform case") {
        const auto avg = averaged_graph(small_params(4, 0, 0.5, 0.5, 0.0));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) CHECK(avg.weights(i, j) == (i == j ? 0.0 : 0.5));
        CHECK(avg.expected_edge_count == 3.0);
    }
    SUBCASE("deterministic in the parameters") {
        const auto params = small_params(6, 2, 0.37, 0.11, 0.23);
        const auto a = averaged_graph(params);
        const auto b = averaged_graph(params);
        CHECK(a.weights == b.weights);
        CHECK(a.expected_edge_count == b.expected_edge_count);
    }
}

TEST_CASE("empirical edge frequencies converge to the averaged weights") {
    const auto params = small_params(6, 2, 0.6, 0.15, 0.35);
    const auto avg = averaged_graph(params);
    const int n = params.n_total();
    const int samples = 10000;

    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, n);
    Rng rng = make_rng(4242);
    for (int s = 0; s < samples; ++s) {
        const auto g = sample_sbm_s(params, rng);
        for (const auto& [a, b] : g.edges()) {
            counts(a, b) += 1.0;
            counts(b, a) += 1.0;
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double w = avg.weights(i, j);
            const double empirical = counts(i, j) / samples;
            const double bound = 4.0 * std::sqrt(std::max(w * (1.0 - w), 1e-12) / samples);
            CHECK(std::abs(empirical - w) <= std::max(bound, 0.02));
        }
    }
}

TEST_CASE("stubborn influence row sums") {
    SUBCASE("zero matrix is uniformly zero") {
        const auto info = stubborn_influence_row_sums(small_params(4, 2, 0.5, 0.5, 0.0));
        CHECK(info.uniform);
        CHECK(info.common_value == 0.0);
        CHECK(info.row_sums.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("block structure is uniform at p * n_s/2") {
        SbmSParams params = small_params(6, 4, 0.5, 0.5, 0.0);
        params.stubborn_links = block_stubborn_links(6, 4, 0.3);
        const auto info = stubborn_influence_row_sums(params);
        CHECK(info.uniform);
        CHECK(*info.common_value == doctest::Approx(0.3 * 2).epsilon(1e-12));
    }
    SUBCASE("non-uniform rows are reported, not rejected") {
        SbmSParams params = small_params(2, 2, 0.5, 0.5, 0.0);
        params.stubborn_links << 0.1, 0.0, 0.0, 0.3;
        const auto info = stubborn_influence_row_sums(params);
        CHECK_FALSE(info.uniform);
        CHECK_FALSE(info.common_value.has_value());
        CHECK(info.row_sums(0) == doctest::Approx(0.1));
        CHECK(info.row_sums(1) == doctest::Approx(0.3));
    }
}

TEST_CASE("block influence check") {
    SUBCASE("signed block configuration holds") {
        SbmSParams params = small_params(6, 4, 0.5, 0.5, 0.0);
        params.stubborn_links = block_stubborn_links(6, 4, 0.3);
        Eigen::VectorXd z(4);
        z << 1.0, 1.0, -1.0, -1.0;
        const auto check = check_block_influence(params, z);
        CHECK(check.holds);
        CHECK(*check.community1_value == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(*check.community2_value == doctest::Approx(-0.6).epsilon(1e-12));
    }
    SUBCASE("zero opinions violate the distinctness requirement") {
        SbmSParams params = small_params(6, 4, 0.5, 0.5, 0.0);
        params.stubborn_links = block_stubborn_links(6, 4, 0.3);
        const auto check = check_block_influence(params, Eigen::VectorXd::Zero(4));
        CHECK_FALSE(check.holds);
        CHECK_FALSE(check.violation.empty());
    }
    SUBCASE("zero links violate the distinctness requirement") {
        const auto check = check_block_influence(small_params(6, 4, 0.5, 0.5, 0.0),
                                                 Eigen::VectorXd::Ones(4));
        CHECK_FALSE(check.holds);
    }
    SUBCASE("non-constant block is reported") {
        SbmSParams params = small_params(4, 1, 0.5, 0.5, 0.0);
        params.stubborn_links << 0.1, 0.2, 0.0, 0.0;
        const auto check = check_block_influence(params, Eigen::VectorXd::Ones(1));
        CHECK_FALSE(check.holds);
        CHECK(check.violation.find("not constant") != std::string::npos);
    }
}

TEST_CASE("karate club fixture") {
    const auto club = karate_club();
    CHECK(club.graph.n_total() == 34);
    CHECK(club.graph.n_regular() == 32);
    CHECK(club.graph.n_stubborn() == 2);
    CHECK(club.graph.edge_count() == 78);

    // Leaders keep their degrees after renumbering.
    CHECK(club.graph.degree(32) == 16);  // original node 1
    CHECK(club.graph.degree(33) == 17);  // original node 34
    CHECK(club.stubborn_opinions(0) == 1.0);
    CHECK(club.stubborn_opinions(1) == -1.0);
    CHECK(club.original_ids[32] == 1);
    CHECK(club.original_ids[33] == 34);

    CHECK(club.truth.valid());
    const long ones = std::count(club.truth.labels.begin(), club.truth.labels.end(), 1);
    CHECK(ones == 15);
    CHECK(club.truth.size() - ones == 17);
    // Node 9 sides with the administrator under the faction convention.
    CHECK(club.truth.labels[9 - 2] == 2);

    // No edge between the two leaders.
    CHECK_FALSE(club.graph.has_edge(32, 33));
}

TEST_CASE("graph constructor rejects malformed edge lists") {
    CHECK_THROWS_AS(SampledGraph(2, 0, {{0, 0}}), InvalidInput);
    CHECK_THROWS_AS(SampledGraph(2, 0, {{0, 2}}), InvalidInput);
    CHECK_THROWS_AS(SampledGraph(3, 0, {{0, 1}, {1, 0}}), InvalidInput);
}

#include <benchmark/benchmark.h>

#include <cmath>

#include "gossipdet/detect.hpp"
#include "gossipdet/gossip.hpp"
#include "gossipdet/oracle.hpp"
#include "gossipdet/sbm.hpp"

namespace {

using namespace gossipdet;

SbmSParams sweep_params(long n) {
    const double logn = std::log(static_cast<double>(n));
    SbmSParams params;
    params.n_regular = static_cast<int>(9 * n / 10);
    params.n_stubborn = static_cast<int>(n) - params.n_regular;
    params.p_within = std::min(0.99, logn * logn / static_cast<double>(n));
    params.p_between = std::min(0.99, logn / static_cast<double>(n));
    params.stubborn_links =
        block_stubborn_links(params.n_regular, params.n_stubborn,
                             std::min(0.99, std::pow(logn, 2.5) / static_cast<double>(n)));
    return params;
}

void BM_SampleGraph(benchmark::State& state) {
    const auto params = sweep_params(state.range(0));
    Rng rng = make_rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(sample_sbm_s(params, rng));
}
BENCHMARK(BM_SampleGraph)->Arg(100)->Arg(1000)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_GossipSteps(benchmark::State& state) {
    const auto params = sweep_params(state.range(0));
    Rng rng = make_rng(2);
    const auto graph = sample_sbm_s(params, rng);
    const InteractionDistribution dist(graph);
    Eigen::VectorXd x0(graph.n_regular());
    for (int i = 0; i < graph.n_regular(); ++i) x0(i) = 2.0 * uniform01(rng) - 1.0;
    Eigen::VectorXd z(graph.n_stubborn());
    for (int j = 0; j < graph.n_stubborn(); ++j) z(j) = j % 2 == 0 ? 1.0 : -1.0;

    GossipState gossip(x0, z);
    for (auto _ : state) step(gossip, dist, rng);
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GossipSteps)->Arg(100)->Arg(1000)->Arg(10000);

void BM_RunningAverageRead(benchmark::State& state) {
    const auto params = sweep_params(state.range(0));
    Rng rng = make_rng(3);
    const auto graph = sample_sbm_s(params, rng);
    const InteractionDistribution dist(graph);
    GossipState gossip(Eigen::VectorXd::Zero(graph.n_regular()),
                       Eigen::VectorXd::Zero(graph.n_stubborn()));
    for (int k = 0; k < 1000; ++k) step(gossip, dist, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gossip.running_average());
        step(gossip, dist, rng);
    }
}
BENCHMARK(BM_RunningAverageRead)->Arg(1000)->Arg(10000);

void BM_KmeansTwo(benchmark::State& state) {
    Rng rng = make_rng(4);
    std::vector<double> values(static_cast<std::size_t>(state.range(0)));
    for (auto& v : values) v = 2.0 * uniform01(rng) - 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(kmeans_two(values));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KmeansTwo)->Arg(32)->Arg(900)->Arg(9000);

void BM_ExpectedDynamicsSolve(benchmark::State& state) {
    const auto params = sweep_params(state.range(0));
    Rng rng = make_rng(5);
    const auto graph = sample_sbm_s(params, rng);
    Eigen::VectorXd z(graph.n_stubborn());
    for (int j = 0; j < graph.n_stubborn(); ++j) z(j) = j % 2 == 0 ? 1.0 : -1.0;
    for (auto _ : state) {
        const auto dynamics = expected_update_matrices(graph);
        benchmark::DoNotOptimize(expected_final_opinions(dynamics, z));
    }
}
BENCHMARK(BM_ExpectedDynamicsSolve)->Arg(100)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "hdm/fkappa.hpp"
#include "hdm/kernels.hpp"
#include "hdm/rng.hpp"

using namespace hdm;

namespace {

const MCCloud& cloud(std::size_t m) {
    static const MCCloud c = make_cloud(CloudKind::glm, 200000, 1.0, LinkFunction::logistic(), 1);
    static const MCCloud s = make_cloud(CloudKind::glm, 5000, 1.0, LinkFunction::logistic(), 1);
    return m > 5000 ? c : s;
}

void BM_FKappaParallel(benchmark::State& st) {
    const MCCloud& c = cloud(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(f_kappa(c, 1.0, {0.3, 0.8}));
}
void BM_FKappaSerial(benchmark::State& st) {
    const MCCloud& c = cloud(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(reference::f_kappa(c, 1.0, {0.3, 0.8}));
}

struct Design {
    Matrix Z;
    Vec eta;
    explicit Design(std::size_t n) : Z(n, 2 * n), eta(n) {
        for (std::size_t i = 0; i < Z.data.size(); ++i) Z.data[i] = normal_at(2, i);
        for (std::size_t i = 0; i < n; ++i) eta[i] = uniform_at(3, i);
    }
};

void BM_ZtParallel(benchmark::State& st) {
    const Design d(static_cast<std::size_t>(st.range(0)));
    Vec g;
    for (auto _ : st) {
        zt_times(d.Z, d.eta, g);
        benchmark::DoNotOptimize(g.data());
    }
}
void BM_ZtSerial(benchmark::State& st) {
    const Design d(static_cast<std::size_t>(st.range(0)));
    Vec g;
    for (auto _ : st) {
        reference::zt_times(d.Z, d.eta, g);
        benchmark::DoNotOptimize(g.data());
    }
}

}  // namespace

BENCHMARK(BM_FKappaParallel)->Arg(5000)->Arg(200000);
BENCHMARK(BM_FKappaSerial)->Arg(5000)->Arg(200000);
BENCHMARK(BM_ZtParallel)->Arg(400)->Arg(1200);
BENCHMARK(BM_ZtSerial)->Arg(400)->Arg(1200);

BENCHMARK_MAIN();

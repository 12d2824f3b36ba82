// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <memory>

#include "curlflow/advection.hpp"
#include "curlflow/diagnostics.hpp"
#include "curlflow/scenario.hpp"
#include "curlflow/streamfunc2d.hpp"
#include "curlflow/vecpot3d.hpp"

using namespace curlflow;

namespace {

const MacField2& field2() {
    static const MacField2 f = random_divergence_free(GridDesc2{256, 256, 1.0, {}}, DomainBc::closed(), 1, 1e-10);
    return f;
}

const MacField3& field3() {
    static const MacField3 f = random_divergence_free(GridDesc3{48, 48, 48, 1.0, {}}, DomainBc::closed(), 2, 1e-10);
    return f;
}

std::shared_ptr<CurlFlowSampler3> sampler3() {
    static auto s = [] {
        const auto raw = parallel_sweep_3d(field3(), DomainBc::closed());
        return std::make_shared<CurlFlowSampler3>(std::make_shared<PotentialInterpolant3>(raw.edges),
                                                  KernelOrder::Quadratic);
    }();
    return s;
}

void BM_Sweep2D(benchmark::State& st) {
    const MacField2& f = field2();
    for (auto _ : st) benchmark::DoNotOptimize(sweep_stream_function(f));
}
void BM_Sweep2D_Serial(benchmark::State& st) {
    const MacField2& f = field2();
    for (auto _ : st) benchmark::DoNotOptimize(serial::sweep_stream_function(f));
}

void BM_Sweep3D(benchmark::State& st) {
    const MacField3& f = field3();
    for (auto _ : st) benchmark::DoNotOptimize(parallel_sweep_3d(f, DomainBc::closed()));
}
void BM_Sweep3D_Serial(benchmark::State& st) {
    const MacField3& f = field3();
    for (auto _ : st) benchmark::DoNotOptimize(serial::parallel_sweep_3d(f, DomainBc::closed()));
}

template <bool Parallel>
void BM_Advect(benchmark::State& st) {
    const auto s = sampler3();
    const GridDesc3 g = field3().desc;
    const ParticleSet3 start = seed_particles(g, 1, 3);
    for (auto _ : st) {
        st.PauseTiming();
        ParticleSet3 ps = start;
        st.ResumeTiming();
        if constexpr (Parallel) advect_particles(ps, *s, nullptr, 0.5, CollisionPolicy::None);
        else serial::advect_particles(ps, *s, nullptr, 0.5, CollisionPolicy::None);
        benchmark::DoNotOptimize(ps.pos.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<long long>(start.size()));
}

template <bool Parallel>
void BM_Divergence(benchmark::State& st) {
    const auto s = sampler3();
    for (auto _ : st) {
        if constexpr (Parallel) benchmark::DoNotOptimize(sample_divergence(*s, 1.0, 20000, 4));
        else benchmark::DoNotOptimize(serial::sample_divergence(*s, 1.0, 20000, 4));
    }
    st.SetItemsProcessed(st.iterations() * 20000);
}

}  // namespace

BENCHMARK(BM_Sweep2D)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Sweep2D_Serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Sweep3D)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Sweep3D_Serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Advect<true>)->Name("BM_Advect")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Advect<false>)->Name("BM_Advect_Serial")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Divergence<true>)->Name("BM_Divergence")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Divergence<false>)->Name("BM_Divergence_Serial")->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();

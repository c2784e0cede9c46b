// Hot paths at desk scale: Gram assembly, the closed-form inverse against
// the dense one it replaces, classification, the perturbation certificate,
// and the text round trip. Instances are built outside the timed loops.

#include <benchmark/benchmark.h>

#include "ffgram/corpus.hpp"
#include "ffgram/gram.hpp"
#include "ffgram/serialize.hpp"
#include "ffgram/stability.hpp"

namespace {

using namespace ffgram;

std::vector<Eigen::Index> pair_dims(Eigen::Index n) {
    std::vector<Eigen::Index> dims;
    for (Eigen::Index rem = n; rem > 0; rem -= 2) dims.push_back(2);
    return dims;
}

InstanceSpec spec_for(InstanceKind kind, Eigen::Index n, double theta = 0.0) {
    InstanceSpec spec;
    spec.kind = kind;
    spec.seed = 42;
    spec.ambient_dim = n;
    spec.subspace_dims = pair_dims(n);
    spec.weight_law = WeightLaw::uniform(0.8, 1.6);
    spec.theta = theta;
    spec.validate();
    return spec;
}

void bench_cross_gram(benchmark::State& state) {
    const Eigen::Index n = state.range(0);
    auto inst = generate(spec_for(InstanceKind::riesz_basis, n));
    GramTriple t(random_invertible(7, n), inst.primary, inst.primary);
    for (auto _ : state) {
        BlockOperator g = cross_gram(t);
        benchmark::DoNotOptimize(g.matrix);
    }
}
BENCHMARK(bench_cross_gram)->Arg(8)->Arg(16)->Arg(32);

void bench_inverse_closed_form(benchmark::State& state) {
    const Eigen::Index n = state.range(0);
    auto inst = generate(spec_for(InstanceKind::riesz_basis, n));
    GramTriple t(random_invertible(7, n), inst.primary, inst.primary);
    for (auto _ : state) {
        GramInverseReport r = gram_inverse(t, InverseMode::ww);
        benchmark::DoNotOptimize(r.resid_left);
    }
}
BENCHMARK(bench_inverse_closed_form)->Arg(8)->Arg(16)->Arg(32);

void bench_inverse_dense(benchmark::State& state) {
    const Eigen::Index n = state.range(0);
    auto inst = generate(spec_for(InstanceKind::riesz_basis, n));
    GramTriple t(random_invertible(7, n), inst.primary, inst.primary);
    const Mat g = cross_gram(t).matrix;
    for (auto _ : state) {
        InverseResult r = inverse_checked(g);
        benchmark::DoNotOptimize(r.sigma_min);
    }
}
BENCHMARK(bench_inverse_dense)->Arg(8)->Arg(16)->Arg(32);

void bench_classify(benchmark::State& state) {
    const Eigen::Index n = state.range(0);
    auto inst = generate(spec_for(InstanceKind::generic_frame, n));
    for (auto _ : state) {
        Classification c = classify(inst.primary);
        benchmark::DoNotOptimize(c.lower);
    }
}
BENCHMARK(bench_classify)->Arg(8)->Arg(16)->Arg(32);

void bench_stability_certificate(benchmark::State& state) {
    const Eigen::Index n = state.range(0);
    auto pair = generate(spec_for(InstanceKind::perturbation_pair, n, 1e-3));
    Mat u1 = near_identity(3, n, 0.3);
    Mat u2 = u1 + 1e-4 * near_identity(4, n, 1.0);
    PerturbationInstance inst(pair.primary, pair.primary, *pair.secondary, u1, u2);
    for (auto _ : state) {
        StabilityReport r = check_stability(inst);
        benchmark::DoNotOptimize(r.lhs);
    }
}
BENCHMARK(bench_stability_certificate)->Arg(8)->Arg(16);

void bench_text_round_trip(benchmark::State& state) {
    const Eigen::Index n = state.range(0);
    auto inst = generate(spec_for(InstanceKind::generic_frame, n));
    const std::string text = serialize(inst.primary);
    for (auto _ : state) {
        WeightedFamily f = parse_family(text);
        benchmark::DoNotOptimize(f.ambient);
    }
}
BENCHMARK(bench_text_round_trip)->Arg(8)->Arg(32);

} // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "phmp/chain_recurrence.hpp"
#include "phmp/hyperbolicity.hpp"
#include "phmp/markov.hpp"
#include "phmp/models.hpp"

using namespace phmp;

static void BM_BoxGraphSolenoid(benchmark::State& st) {
  auto f = make_model("solenoid");
  auto region = full_set(make_grid(f->chart(), static_cast<int>(st.range(0))));
  for (auto _ : st) benchmark::DoNotOptimize(build_box_graph(*f, region, 0).edge_count());
  st.SetItemsProcessed(st.iterations() * static_cast<long>(region.size()));
}
BENCHMARK(BM_BoxGraphSolenoid)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_MorseDecomposition(benchmark::State& st) {
  auto f = make_model("solenoid");
  auto g = build_box_graph(*f, full_set(make_grid(f->chart(), static_cast<int>(st.range(0)))), 0);
  for (auto _ : st) benchmark::DoNotOptimize(morse_decomposition(g).scc_count);
}
BENCHMARK(BM_MorseDecomposition)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_VerifySolenoidPartition(benchmark::State& st) {
  auto f = make_model("solenoid");
  auto mp = solenoid_partition();
  RasterOptions ro;
  ro.resolution = static_cast<int>(st.range(0));
  ro.check_doubling = false;
  for (auto _ : st) benchmark::DoNotOptimize(verify_partition(*f, mp, ro).pass);
}
BENCHMARK(BM_VerifySolenoidPartition)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_CertifyHorseshoeCones(benchmark::State& st) {
  auto f = make_model("horseshoe3d");
  auto region = full_set(make_grid(Box3{{-1, -1, 0}, {1, 1, 1}}, static_cast<int>(st.range(0))));
  auto cf = named_cone_field("vertical-cone", deg(30));
  for (auto _ : st) benchmark::DoNotOptimize(certify_unstable_cones(*f, region, cf).pass);
}
BENCHMARK(BM_CertifyHorseshoeCones)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

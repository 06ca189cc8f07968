#include <benchmark/benchmark.h>

#include <random>

#include "tricloud/codec.hpp"
#include "tricloud/datagen.hpp"
#include "tricloud/entropy.hpp"
#include "tricloud/geom.hpp"
#include "tricloud/octree.hpp"
#include "tricloud/transform.hpp"

using namespace tricloud;

namespace {

GroupOfFrames sequence(std::uint32_t frames) {
  datagen::SequenceParams p;
  p.frames = frames;
  return datagen::gen_sequence(p).front();
}

const TriangleCloudFrame& reference_frame() {
  static const auto g = sequence(1);
  return g.frames[0];
}

const std::vector<Vec3>& refined_points() {
  static const auto pts = [] {
    const auto& f = reference_frame();
    return geom::refine(f.vertices, f.faces, f.upsample);
  }();
  return pts;
}

void BM_Voxelize(benchmark::State& state) {
  const auto& pts = refined_points();
  const auto colors = Matrix::from_rows(reference_frame().colors);
  for (auto _ : state) benchmark::DoNotOptimize(geom::voxelize(pts, colors, 10));
  state.SetItemsProcessed(state.iterations() * std::int64_t(pts.size()));
}
BENCHMARK(BM_Voxelize)->Unit(benchmark::kMillisecond);

void BM_RahtForward(benchmark::State& state) {
  const auto v = geom::voxelize(refined_points(), Matrix::from_rows(reference_frame().colors), 10);
  const auto plan = transform::raht_plan(v.voxel_set.codes, 10);
  for (auto _ : state) benchmark::DoNotOptimize(transform::raht_forward(plan, v.voxel_set.attributes));
  state.SetItemsProcessed(state.iterations() * std::int64_t(v.voxel_set.size()));
}
BENCHMARK(BM_RahtForward)->Unit(benchmark::kMillisecond);

void BM_RahtInverse(benchmark::State& state) {
  const auto v = geom::voxelize(refined_points(), Matrix::from_rows(reference_frame().colors), 10);
  const auto plan = transform::raht_plan(v.voxel_set.codes, 10);
  const auto c = transform::raht_forward(plan, v.voxel_set.attributes).coefficients;
  for (auto _ : state) benchmark::DoNotOptimize(transform::raht_inverse(plan, c));
  state.SetItemsProcessed(state.iterations() * std::int64_t(v.voxel_set.size()));
}
BENCHMARK(BM_RahtInverse)->Unit(benchmark::kMillisecond);

std::vector<std::int64_t> laplacian(std::size_t n, double scale) {
  std::mt19937_64 rng(7);
  std::geometric_distribution<std::int64_t> geo(1.0 / (1.0 + scale));
  std::vector<std::int64_t> s(n);
  for (auto& x : s) x = geo(rng) - geo(rng);
  return s;
}

void BM_RlgrEncode(benchmark::State& state) {
  const auto s = laplacian(100000, double(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(entropy::rlgr_encode(s));
  state.SetItemsProcessed(state.iterations() * std::int64_t(s.size()));
}
BENCHMARK(BM_RlgrEncode)->Arg(0)->Arg(4)->Arg(100);

void BM_RlgrDecode(benchmark::State& state) {
  const auto s = laplacian(100000, double(state.range(0)));
  const auto bytes = entropy::rlgr_encode(s);
  for (auto _ : state) benchmark::DoNotOptimize(entropy::rlgr_decode(bytes, s.size()));
  state.SetItemsProcessed(state.iterations() * std::int64_t(s.size()));
}
BENCHMARK(BM_RlgrDecode)->Arg(0)->Arg(4)->Arg(100);

void BM_OctreeSerialize(benchmark::State& state) {
  const auto v = geom::voxelize(refined_points(), 10).voxel_set;
  for (auto _ : state) benchmark::DoNotOptimize(octree::serialize(v));
  state.SetItemsProcessed(state.iterations() * std::int64_t(v.size()));
}
BENCHMARK(BM_OctreeSerialize)->Unit(benchmark::kMillisecond);

void BM_OctreeParse(benchmark::State& state) {
  const auto bytes = octree::serialize(geom::voxelize(refined_points(), 10).voxel_set);
  for (auto _ : state) benchmark::DoNotOptimize(octree::parse(bytes, 10));
}
BENCHMARK(BM_OctreeParse)->Unit(benchmark::kMillisecond);

void BM_EncodeGof(benchmark::State& state) {
  const auto g = sequence(std::uint32_t(state.range(0)));
  CodecParams p;
  p.step_motion = 4;
  p.step_color_intra = 4;
  p.step_color_inter = 4;
  for (auto _ : state) benchmark::DoNotOptimize(codec::encode_gof(g, p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EncodeGof)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_DecodeGof(benchmark::State& state) {
  const auto g = sequence(std::uint32_t(state.range(0)));
  CodecParams p;
  p.step_motion = 4;
  p.step_color_intra = 4;
  p.step_color_inter = 4;
  const auto enc = codec::encode_gof(g, p).encoded;
  for (auto _ : state) benchmark::DoNotOptimize(codec::decode_gof(enc));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DecodeGof)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

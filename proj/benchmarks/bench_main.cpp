#include "chartforge/attention.hpp"
#include "chartforge/fusion.hpp"
#include "chartforge/geometry.hpp"
#include "chartforge/mask.hpp"
#include "chartforge/modification.hpp"
#include "chartforge/render.hpp"
#include "chartforge/table.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

using namespace chartforge;

namespace {

chart::ChartGeometry bar_geometry(int side) {
    const auto table = chart::parse_table("k,v\na,3\nb,7\nc,5\nd,9\ne,2\n", chart::TableFormat::csv);
    chart::ChartSpec spec;
    spec.canvas = {side, side};
    spec = chart::with_default_columns(spec, table);
    return chart::derive_geometry(table, spec);
}

attention::AttentionGrid bump_grid(double cx, double cy, double sigma) {
    std::vector<double> v(256);
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j)
            v[i * 16 + j] = std::exp(-((j - cx) * (j - cx) + (i - cy) * (i - cy)) / (2 * sigma * sigma));
    return attention::AttentionGrid(16, v, "obj");
}

void BM_CrossAttention(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    attention::AttentionInputs in{Eigen::MatrixXd::Random(n, 64), Eigen::MatrixXd::Random(77, 64),
                                  Eigen::MatrixXd::Random(77, 64), 64};
    for (auto _ : state) benchmark::DoNotOptimize(attention::cross_attention(in));
}
BENCHMARK(BM_CrossAttention)->Arg(16)->Arg(256)->Arg(1024);

void BM_ThresholdMask(benchmark::State& state) {
    const auto grid = bump_grid(7.3, 8.1, 2.5);
    for (auto _ : state) benchmark::DoNotOptimize(attention::threshold_mask(grid));
}
BENCHMARK(BM_ThresholdMask);

void BM_FuseForeground(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const auto mask = chart::synthesize_mask(bar_geometry(side), chart::MaskVariant::solid_marks);
    const auto grid = bump_grid(7.3, 8.1, 2.5);
    for (auto _ : state) benchmark::DoNotOptimize(attention::fuse_foreground(mask, grid));
}
BENCHMARK(BM_FuseForeground)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_FuseForegroundMarks(benchmark::State& state) {
    const auto mask = chart::synthesize_mask(bar_geometry(512), chart::MaskVariant::solid_marks);
    const auto grid = bump_grid(7.3, 8.1, 2.5);
    for (auto _ : state) benchmark::DoNotOptimize(attention::fuse_foreground_marks(mask, grid));
}
BENCHMARK(BM_FuseForegroundMarks)->Unit(benchmark::kMillisecond);

void BM_RenderPlain(benchmark::State& state) {
    const auto geo = bar_geometry(512);
    for (auto _ : state) benchmark::DoNotOptimize(chart::render_plain(geo));
}
BENCHMARK(BM_RenderPlain)->Unit(benchmark::kMillisecond);

void BM_Ssim(benchmark::State& state) {
    std::mt19937 rng(3);
    RasterImage a(64, 100), b(64, 100);
    for (int y = 0; y < 100; ++y)
        for (int x = 0; x < 64; ++x) {
            const auto v = static_cast<std::uint8_t>(rng() & 0xff);
            a.set(x, y, {v, v, v, 255});
            b.set(x, y, {static_cast<std::uint8_t>(255 - v), v, v, 255});
        }
    for (auto _ : state) benchmark::DoNotOptimize(modify::ssim(a, b));
}
BENCHMARK(BM_Ssim)->Unit(benchmark::kMicrosecond);

void BM_WarpToHeight(benchmark::State& state) {
    RasterImage el(64, 300, {200, 80, 40, 255});
    const auto slices = modify::cut_grids(el, 5);
    for (auto _ : state) benchmark::DoNotOptimize(modify::warp_to_height(slices, 180));
}
BENCHMARK(BM_WarpToHeight)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();

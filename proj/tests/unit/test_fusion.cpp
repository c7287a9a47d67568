#include "chartforge/fusion.hpp"
#include "chartforge/error.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace chartforge;
using namespace chartforge::attention;

namespace {

AttentionGrid bump(double cr, double cc, double sigma) {
    std::vector<double> v(kGridSide * kGridSide);
    for (int r = 0; r < kGridSide; ++r)
        for (int c = 0; c < kGridSide; ++c)
            v[r * kGridSide + c] = std::exp(-((r - cr) * (r - cr) + (c - cc) * (c - cc)) / (2 * sigma * sigma));
    return AttentionGrid(kGridSide, v, "obj");
}

std::vector<std::uint8_t> bits(const BinaryMask& m) { return {m.bits().begin(), m.bits().end()}; }

} // namespace

TEST_SUITE("fusion") {

TEST_CASE("search grid") {
    CHECK(search_theta(0) == doctest::Approx(-std::numbers::pi / 4));
    CHECK(search_theta(9) == 0.0);
    CHECK(search_theta(18) == doctest::Approx(std::numbers::pi / 4));
    CHECK(search_scale(0) == 0.5);
    CHECK(search_scale(10) == 1.0);
    CHECK(search_scale(20) == 1.5);
}

TEST_CASE("identity maps pixels onto themselves") {
    double qx = 0, qy = 0;
    REQUIRE(source_position({40, 30}, {}, 7, 11, qx, qy));
    CHECK(qx == doctest::Approx(7));
    CHECK(qy == doctest::Approx(11));
    auto g = bump(6, 9, 2.5);
    for (int y = 0; y < 32; y += 5)
        for (int x = 0; x < 32; x += 3) CHECK(transformed_value(g, {32, 32}, {}, x, y) == doctest::Approx(grid_value_at(g, {32, 32}, x, y)));
}

TEST_CASE("mask equal to the footprint recovers the identity") {
    for (auto [r, c, s] : {std::tuple{7.5, 7.5, 2.0}, std::tuple{5.0, 9.0, 2.5}, std::tuple{10.0, 6.0, 1.7}}) {
        auto g = bump(r, c, s);
        auto fp = threshold_mask(g);
        auto mask = upsample_mask(fp, {64, 64});
        auto fused = fuse_foreground(mask, g);
        CHECK(fused.params == AffineParams{0.0, 1.0});
        auto o = oracle::exhaustive_fusion(fp.bits, kGridSide, bits(mask), 64, 64);
        CHECK(fused.objective == o.objective);
        CHECK(fused.objective == double(mask.count()));
    }
}

TEST_CASE("searched optimum equals the exhaustive oracle") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> pos(2, 13), sig(1.2, 3.5);
    for (int t = 0; t < 6; ++t) {
        auto g = bump(pos(rng), pos(rng), sig(rng));
        BinaryMask mask(48, 40);
        const int x0 = int(rng() % 20), y0 = int(rng() % 16);
        for (int y = y0; y < y0 + 18; ++y)
            for (int x = x0; x < x0 + 14; ++x) mask.set(x, y, true);
        auto fused = fuse_foreground(mask, g);
        auto o = oracle::exhaustive_fusion(threshold_mask(g).bits, kGridSide, bits(mask), 48, 40);
        CHECK(fused.objective == o.objective);
        CHECK(fused.params.theta == doctest::Approx(o.theta));
        CHECK(fused.params.scale == doctest::Approx(o.scale));
        CHECK(fusion_objective(threshold_mask(g), mask, fused.params) == fused.objective);
    }
}

TEST_CASE("full mask matches the oracle pose") {
    auto g = bump(7.5, 7.5, 2.0);
    BinaryMask mask(40, 40, true);
    auto fused = fuse_foreground(mask, g);
    auto o = oracle::exhaustive_fusion(threshold_mask(g).bits, kGridSide, bits(mask), 40, 40);
    CHECK(fused.objective == o.objective);
    CHECK(fused.params.theta == doctest::Approx(o.theta));
    CHECK(fused.params.scale == doctest::Approx(o.scale));
    // a pixelated disc is not rotation invariant, so zero rotation only wins a tie
    const auto upright = fusion_objective(threshold_mask(g), mask, {0.0, fused.params.scale});
    CHECK(upright <= fused.objective);
    if (upright == fused.objective) CHECK(fused.params.theta == 0.0);
}

TEST_CASE("tied poses prefer zero rotation and unit scale") {
    auto g = bump(7.5, 7.5, 2.0);
    BinaryMask mask(40, 40);
    mask.set(0, 0, true); // outside every candidate footprint
    auto fused = fuse_foreground(mask, g);
    CHECK(fused.objective == 0);
    CHECK(fused.params.theta == 0.0);
    CHECK(fused.params.scale == 1.0);
}

TEST_CASE("fused pixels stay inside the mask") {
    auto geo = fixtures::geometry(chart::ChartType::bar, 128);
    auto cm = chart::synthesize_mask(geo, chart::MaskVariant::solid_marks);
    auto g = bump(7, 8, 2.2);
    for (const auto& fused : {fuse_foreground(cm, g), fuse_foreground_marks(cm, g)}) {
        REQUIRE(fused.pixels.width() == 128);
        for (int y = 0; y < 128; ++y)
            for (int x = 0; x < 128; ++x) {
                const double v = fused.pixels.at(x, y);
                CHECK((v >= 0.0 && v <= 1.0));
                if (!cm.pixels.at(x, y)) CHECK(v == 0.0);
            }
    }
    auto per_mark = fuse_foreground_marks(cm, g);
    CHECK(per_mark.regions.size() == geo.marks.size());
    for (const auto& r : per_mark.regions) CHECK(r.objective > 0);
}

TEST_CASE("empty mask") {
    auto g = bump(7, 7, 2);
    CHECK(fixtures::code_of([&] { fuse_foreground(BinaryMask(16, 16), g); }) == ErrorCode::EmptyMask);
    CHECK(fixtures::code_of([&] { fuse_background(BinaryMask(16, 16), {1, 2, 3}); }) == ErrorCode::EmptyMask);
}

TEST_CASE("background fusion paints the mask") {
    auto full = fuse_background(BinaryMask(8, 8, true), {255, 255, 255});
    for (double v : full.pixels.values()) CHECK(v == 1.0);

    auto geo = fixtures::geometry(chart::ChartType::bar, 96);
    auto cm = chart::synthesize_mask(geo, chart::MaskVariant::solid_marks);
    auto fused = fuse_background(cm.pixels, {200, 100, 0});
    auto img = to_raster(fused);
    for (int y = 0; y < 96; ++y)
        for (int x = 0; x < 96; ++x) {
            bool inside = false;
            for (const auto& m : geo.marks) inside = inside || std::get<chart::BarRect>(m.shape).rect.contains(x, y);
            CHECK((img.at(x, y).rgb() == Rgb{200, 100, 0}) == inside);
            CHECK(img.at(x, y).a == 255);
        }
    CHECK(fused.params == AffineParams{});
}

}

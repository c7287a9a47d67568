#include "chartforge/attention.hpp"
#include "chartforge/error.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace chartforge;
using namespace chartforge::attention;

namespace {

oracle::Matrix to_rows(const Eigen::MatrixXd& m) {
    oracle::Matrix out(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
    return out;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int r, int c) {
    std::uniform_real_distribution<double> u(-2, 2);
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = u(rng);
    return m;
}

RasterImage solid(int w, int h, Rgba c) { return RasterImage(w, h, c); }

ObjectMask mask_from(const std::vector<int>& rows, int side = kGridSide) {
    ObjectMask m;
    m.side = side;
    m.bits.assign(static_cast<std::size_t>(side) * side, 0);
    for (int i : rows) m.bits[static_cast<std::size_t>(i)] = 1;
    return m;
}

} // namespace

TEST_SUITE("attention") {

TEST_CASE("single key gives unit scores") {
    std::mt19937_64 rng(1);
    AttentionInputs in{random_matrix(rng, 3, 4), random_matrix(rng, 1, 4), random_matrix(rng, 1, 5), 4};
    auto r = cross_attention(in);
    for (int i = 0; i < 3; ++i) {
        CHECK(r.scores(i, 0) == 1.0);
        for (int c = 0; c < 5; ++c) CHECK(r.output(i, c) == in.values(0, c));
    }
}

TEST_CASE("zero queries give uniform scores") {
    std::mt19937_64 rng(2);
    AttentionInputs in{Eigen::MatrixXd::Zero(2, 3), random_matrix(rng, 4, 3), random_matrix(rng, 4, 2), 3};
    auto r = cross_attention(in);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 4; ++j) CHECK(r.scores(i, j) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("random inputs match the dense oracle") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        AttentionInputs in{random_matrix(rng, 3, 4), random_matrix(rng, 4, 4), random_matrix(rng, 4, 4), 4};
        auto r = cross_attention(in);
        auto o = oracle::naive_attention(to_rows(in.queries), to_rows(in.keys), to_rows(in.values), 4);
        for (int i = 0; i < 3; ++i) {
            double row = 0;
            for (int j = 0; j < 4; ++j) {
                CHECK(std::abs(r.scores(i, j) - o.scores[i][j]) < 1e-9);
                CHECK(std::abs(r.output(i, j) - o.output[i][j]) < 1e-9);
                row += r.scores(i, j);
            }
            CHECK(row == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("large logits stay finite") {
    AttentionInputs in{Eigen::MatrixXd::Constant(1, 2, 800.0), Eigen::MatrixXd::Constant(2, 2, 800.0),
                       Eigen::MatrixXd::Identity(2, 2), 2};
    in.keys(1, 0) = -800;
    auto r = cross_attention(in);
    CHECK(std::isfinite(r.scores(0, 0)));
    CHECK(r.scores(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("dimension checks") {
    AttentionInputs in{Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Zero(2, 4), Eigen::MatrixXd::Zero(2, 1), 3};
    CHECK(fixtures::code_of([&] { cross_attention(in); }) == ErrorCode::DimensionMismatch);
    AttentionInputs bad_v{Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Zero(3, 1), 3};
    CHECK(fixtures::code_of([&] { cross_attention(bad_v); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("threshold on a small grid") {
    AttentionGrid g(2, {1, 0, 0, 0});
    CHECK(g.mean() == 0.25);
    auto m = threshold_mask(g);
    CHECK(m.bits == std::vector<std::uint8_t>{1, 0, 0, 0});
}

TEST_CASE("uniform grid thresholds to nothing") {
    AttentionGrid g(kGridSide, std::vector<double>(kGridSide * kGridSide, 0.37));
    CHECK(threshold_mask(g).count() == 0);
}

TEST_CASE("random grids match the strict-mean oracle") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 1);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> v(kGridSide * kGridSide);
        for (auto& x : v) x = u(rng);
        CHECK(threshold_mask(AttentionGrid(kGridSide, v)).bits == oracle::strict_mean_indicator(v));
    }
}

TEST_CASE("grid validation") {
    CHECK(fixtures::code_of([] { AttentionGrid(2, {1, 2, 3}).validate(); }).has_value());
    CHECK(fixtures::code_of([] { AttentionGrid(2, {1, NAN, 3, 4}).validate(); }).has_value());
}

TEST_CASE("all-ones mask keeps the image") {
    auto img = fixtures::noise_image(64, 64, 5);
    auto out = apply_mask(mask_from([] {
                              std::vector<int> all(kGridSide * kGridSide);
                              for (int i = 0; i < kGridSide * kGridSide; ++i) all[i] = i;
                              return all;
                          }()),
                          img);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) {
            auto c = img.at(x, y);
            c.a = 255;
            REQUIRE(out.image.at(x, y) == c);
        }
    CHECK(out.coarse);
}

TEST_CASE("all-zero mask is transparent") {
    auto out = apply_mask(mask_from({}), fixtures::noise_image(32, 32, 6));
    CHECK(out.image.alpha(0, 0) == 0);
    std::size_t opaque = 0;
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) opaque += out.image.alpha(x, y) != 0;
    CHECK(opaque == 0);
}

TEST_CASE("single cell becomes one block at its location") {
    const int row = 5, col = 9;
    auto out = apply_mask(mask_from({row * kGridSide + col}), solid(512, 512, {9, 9, 9, 255}));
    std::vector<std::uint8_t> bits(512 * 512);
    Rect cell{col * 32, row * 32, 32, 32};
    for (int y = 0; y < 512; ++y)
        for (int x = 0; x < 512; ++x) {
            bits[y * 512 + x] = out.image.alpha(x, y) == 255;
            if (bits[y * 512 + x]) REQUIRE(cell.contains(x, y));
        }
    auto comps = oracle::component_sizes(bits, 512, 512);
    REQUIRE(comps.size() == 1);
    // bilinear >= 0.5 around one lattice point: the cell minus the hyperbolic corners
    const double expected = 1024.0 * 4 * (0.5 - 0.5 * std::log(2.0));
    CHECK(double(comps[0]) == doctest::Approx(expected).epsilon(0.05));
    // full cell extent through the centre
    for (int x = cell.x; x < cell.right(); ++x) CHECK(out.image.alpha(x, cell.y + 16) == 255);
    for (int y = cell.y; y < cell.bottom(); ++y) CHECK(out.image.alpha(cell.x + 16, y) == 255);
}

TEST_CASE("non-square image") {
    CHECK(fixtures::code_of([] { apply_mask(mask_from({0}), RasterImage(20, 10)); }) == ErrorCode::NonSquareImage);
}

TEST_CASE("fallback refinement feathers a single component") {
    RasterImage img(40, 40, {10, 20, 30, 0});
    for (int y = 10; y < 20; ++y)
        for (int x = 10; x < 20; ++x) img.set(x, y, {200, 100, 50, 255});
    auto out = refine_object({img, true});
    CHECK_FALSE(out.coarse);
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 40; ++x) {
            const bool inside = x >= 10 && x < 20 && y >= 10 && y < 20;
            const bool rim = inside && (x == 10 || x == 19 || y == 10 || y == 19);
            CHECK(out.image.at(x, y).rgb() == img.at(x, y).rgb());
            if (!inside) CHECK(out.image.alpha(x, y) == 0);
            else if (rim) CHECK(out.image.alpha(x, y) == 128);
            else CHECK(out.image.alpha(x, y) == 255);
        }
}

TEST_CASE("fallback refinement drops the small component") {
    RasterImage img(40, 40);
    for (int y = 2; y < 12; ++y)
        for (int x = 2; x < 12; ++x) img.set(x, y, {1, 1, 1, 255});
    for (int x = 30; x < 35; ++x) img.set(x, 30, {1, 1, 1, 255});
    std::vector<std::uint8_t> before(40 * 40);
    for (int i = 0; i < 1600; ++i) before[i] = img.alpha(i % 40, i / 40) > 0;
    REQUIRE(oracle::component_sizes(before, 40, 40) == std::vector<std::size_t>{100, 5});

    auto out = refine_object({img, true});
    std::vector<std::uint8_t> after(40 * 40);
    for (int i = 0; i < 1600; ++i) after[i] = out.image.alpha(i % 40, i / 40) > 0;
    CHECK(oracle::component_sizes(after, 40, 40) == std::vector<std::size_t>{100});
}

TEST_CASE("provider matte never grows the coarse alpha") {
    struct Everything : SegmentationProvider {
        std::vector<std::uint8_t> alpha_matte(const RasterImage& img) const override {
            return std::vector<std::uint8_t>(static_cast<std::size_t>(img.width()) * img.height(), 255);
        }
    } provider;
    auto coarse = apply_mask(mask_from({17, 18, 33}), fixtures::noise_image(64, 64, 7));
    auto out = refine_object(coarse, &provider);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) CHECK(out.image.alpha(x, y) <= coarse.image.alpha(x, y));
    CHECK(fixtures::code_of([&] { refine_object(out, &provider); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("dominant color") {
    std::vector<double> left(kGridSide * kGridSide, 0.0);
    for (int r = 0; r < kGridSide; ++r)
        for (int c = 0; c < kGridSide / 2; ++c) left[r * kGridSide + c] = 1.0;
    CHECK(dominant_color(AttentionGrid(kGridSide, left), solid(64, 64, {255, 0, 0, 255})) == Rgb{255, 0, 0});

    RasterImage split(64, 64);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) split.set(x, y, x < 32 ? Rgba{255, 0, 0, 255} : Rgba{0, 0, 255, 255});
    // weighted-mean oracle over the above-mean upsampled weights
    AttentionGrid g(kGridSide, left);
    auto up = upsample(g, split.size());
    double w = 0, r = 0, b = 0;
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
            if (up.at(x, y) > g.mean()) {
                w += up.at(x, y);
                r += up.at(x, y) * split.at(x, y).r;
                b += up.at(x, y) * split.at(x, y).b;
            }
    auto c = dominant_color(g, split);
    CHECK(c.r > c.b);
    CHECK(std::abs(c.r - r / w) <= 0.5 + 1e-9);
    CHECK(std::abs(c.b - b / w) <= 0.5 + 1e-9);

    AttentionGrid uniform(kGridSide, std::vector<double>(kGridSide * kGridSide, 1.0));
    CHECK(dominant_color(uniform, split) == Rgb{128, 0, 128});
}

}

#include "chartforge/error.hpp"
#include "chartforge/evaluation.hpp"
#include "chartforge/mask.hpp"
#include "chartforge/render.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace chartforge;
using namespace chartforge::eval;

namespace {

AxisTrace constant_trace(int width, int height, double row) {
    AxisTrace t;
    t.height = height;
    t.y_of_x.assign(static_cast<std::size_t>(width), row);
    return t;
}

RasterImage from_mask(const BinaryMask& m) {
    return chart::render_mask(m, {0, 0, 0, 255}, {255, 255, 255, 255});
}

} // namespace

TEST_SUITE("evaluation") {

TEST_CASE("thick horizontal line traces its centre row") {
    BinaryMask m(50, 200);
    for (int y = 99; y <= 101; ++y)
        for (int x = 0; x < 50; ++x) m.set(x, y, true);
    auto t = extract_axis(from_mask(m));
    REQUIRE(t.defined_count() == 50);
    for (const auto& v : t.y_of_x) CHECK(*v == 100.0);
}

TEST_CASE("diagonal line") {
    BinaryMask m(60, 60);
    for (int i = 0; i < 60; ++i) m.set(i, i, true);
    auto t = extract_axis(m);
    for (int x = 0; x < 60; ++x) CHECK(std::abs(*t.y_of_x[x] - x) <= 0.5);
}

TEST_CASE("random blobs match the per-column centroid") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        BinaryMask m(40, 30);
        for (int k = 0; k < 6; ++k) {
            const int cx = int(rng() % 40), cy = int(rng() % 30), r = 2 + int(rng() % 5);
            for (int y = 0; y < 30; ++y)
                for (int x = 0; x < 40; ++x)
                    if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.set(x, y, true);
        }
        // the image path keys the background off the top-left pixel, which a blob may cover
        auto t = extract_axis(m);
        auto o = oracle::column_centroids({m.bits().begin(), m.bits().end()}, 40, 30);
        for (int x = 0; x < 40; ++x) {
            REQUIRE(t.y_of_x[x].has_value() == o[x].has_value());
            if (o[x]) CHECK(*t.y_of_x[x] == doctest::Approx(*o[x]).epsilon(1e-12));
        }
    }
    CHECK(fixtures::code_of([] { extract_axis(BinaryMask(5, 5)); }) == ErrorCode::EmptyForeground);
}

TEST_CASE("box smoothing") {
    AxisTrace step;
    step.height = 20;
    for (int i = 0; i < 20; ++i) step.y_of_x.push_back(i < 10 ? 0.0 : 10.0);
    step.y_of_x[15].reset();
    auto id = box_smooth(step, 1);
    CHECK(id.y_of_x == step.y_of_x);
    auto c = constant_trace(12, 20, 7.0);
    CHECK(box_smooth(c, 5).y_of_x == c.y_of_x);
    auto ramp = box_smooth(step, 5);
    auto o = oracle::box_convolve(step.y_of_x, 5);
    for (std::size_t i = 0; i < 20; ++i) {
        REQUIRE(ramp.y_of_x[i].has_value() == o[i].has_value());
        if (o[i]) CHECK(*ramp.y_of_x[i] == doctest::Approx(*o[i]));
    }
    CHECK(*ramp.y_of_x[9] > 0.0);
    CHECK(*ramp.y_of_x[9] < 10.0);
    CHECK(fixtures::code_of([&] { box_smooth(step, 4); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("trend self comparison") {
    auto geo = fixtures::geometry(chart::ChartType::line);
    auto img = chart::render_plain(geo);
    auto rep = trend_score(img, img);
    CHECK(rep.global_score == 1.0);
    CHECK(rep.error_boxes.empty());
    CHECK(rep.metric_kind == MetricKind::trend);
    const int ww = window_width(img.width());
    for (std::size_t i = 0; i < rep.windows.size(); ++i) {
        CHECK(rep.windows[i].score == 1.0);
        CHECK(rep.windows[i].x_start == int(i) * ww);
    }
    CHECK(rep.windows.back().x_end == img.width());
}

TEST_CASE("full height offset scores zero") {
    auto ref = constant_trace(100, 101, 0.0);
    auto gen = constant_trace(100, 101, 100.0);
    auto rep = score_traces(ref, gen, 100);
    for (const auto& w : rep.windows) CHECK(w.score == 0.0);
    CHECK(rep.global_score == 0.0);
    CHECK(rep.error_boxes.size() == rep.windows.size());
}

TEST_CASE("twenty percent deviation in one window") {
    auto ref = constant_trace(200, 101, 50.0);
    auto gen = ref;
    const int ww = window_width(200);
    for (int x = 3 * ww; x < 4 * ww; ++x) gen.y_of_x[x] = 70.0;
    auto rep = score_traces(ref, gen, 200);
    for (const auto& w : rep.windows) {
        if (w.index == 3) CHECK(std::abs(w.score - 0.8) <= 0.01);
        else CHECK(w.score == 1.0);
    }
    REQUIRE(rep.error_boxes.size() == 1);
    CHECK(rep.error_boxes[0].x == 3 * ww);
    CHECK(rep.error_boxes[0].w == ww);
}

TEST_CASE("exact renders score one") {
    for (auto type : {chart::ChartType::bar, chart::ChartType::pie, chart::ChartType::scatter}) {
        auto geo = fixtures::geometry(type);
        auto rep = evaluate(geo, chart::render_plain(geo));
        CHECK(rep.global_score == 1.0);
        CHECK(rep.windows.size() == geo.marks.size());
        CHECK(rep.error_boxes.empty());
    }
    auto line = fixtures::geometry(chart::ChartType::line);
    CHECK(evaluate(line, chart::render_plain(line)).global_score >= 0.99);
}

TEST_CASE("a bar drawn ten percent too tall") {
    auto geo = fixtures::geometry(chart::ChartType::bar);
    auto distorted = geo;
    auto& bar = std::get<chart::BarRect>(distorted.marks[2].shape).rect;
    const int extra = int(std::lround(bar.h * 0.1));
    bar.y -= extra;
    bar.h += extra;
    auto rep = mark_metric_score(geo, chart::render_plain(distorted));
    CHECK(rep.windows[2].score == doctest::Approx(0.9).epsilon(0.02));
    for (int i : {0, 1, 3}) CHECK(rep.windows[i].score == 1.0);
    const bool flagged = rep.windows[2].score < 0.9;
    CHECK(rep.error_boxes.size() == (flagged ? 1u : 0u));
    CHECK(rep.metric_kind == MetricKind::height);
}

TEST_CASE("flagging is strictly below the threshold") {
    auto geo = fixtures::geometry(chart::ChartType::bar);
    auto img = chart::render_plain(geo);
    EvalConfig at_one;
    at_one.error_threshold = 1.0;
    CHECK(mark_metric_score(geo, img, at_one).error_boxes.empty());
}

TEST_CASE("missing bar") {
    auto geo = fixtures::geometry(chart::ChartType::bar);
    auto without = geo;
    without.marks.erase(without.marks.begin() + 1);
    CHECK(fixtures::code_of([&] { mark_metric_score(geo, chart::render_plain(without)); }) == ErrorCode::MarkNotFound);
    CHECK(fixtures::code_of([&] { mark_metric_score(fixtures::geometry(chart::ChartType::line), RasterImage(256, 256)); }) ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("background path") {
    auto geo = fixtures::geometry(chart::ChartType::bar);
    auto mask = chart::synthesize_mask(geo, chart::MaskVariant::solid_marks);
    auto rep = background_score(mask, from_mask(mask.pixels));
    CHECK(rep.global_score >= 0.95);
    CHECK(fixtures::code_of([&] { background_score(mask, RasterImage(256, 256, {9, 9, 9, 255})); }) ==
          ErrorCode::NoEdgesFound);

    RasterImage far(256, 256, {255, 255, 255, 255});
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 256; ++x) far.set(x, y, {0, 0, 0, 255});
    REQUIRE(mask.pixels.dilate(6).bounding_box().y > 12);
    CHECK(fixtures::code_of([&] { background_score(mask, far); }) == ErrorCode::NoEdgesFound);
}

TEST_CASE("report json") {
    auto geo = fixtures::geometry(chart::ChartType::bar);
    auto j = to_json(evaluate(geo, chart::render_plain(geo)));
    CHECK(j.at("global_score") == 1.0);
    CHECK(j.at("metric_kind") == "height");
    CHECK(j.at("windows").size() == geo.marks.size());
}

}

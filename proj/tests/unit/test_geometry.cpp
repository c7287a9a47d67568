#include "chartforge/geometry.hpp"
#include "chartforge/render.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace chartforge;
using namespace chartforge::chart;

namespace {

std::size_t count_color(const RasterImage& img, Rgba c, Rect area) {
    std::size_t n = 0;
    for (int y = area.y; y < area.bottom(); ++y)
        for (int x = area.x; x < area.right(); ++x) n += img.at(x, y) == c;
    return n;
}

} // namespace

TEST_SUITE("geometry") {

TEST_CASE("four equal pie shares are right angles") {
    auto t = fixtures::csv("k,v\na,25\nb,25\nc,25\nd,25\n");
    auto g = derive_geometry(t, fixtures::spec_for(ChartType::pie, t));
    REQUIRE(g.marks.size() == 4);
    double total = 0;
    for (const auto& m : g.marks) {
        const auto& s = std::get<PieSector>(m.shape);
        CHECK(s.sweep() == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
        total += s.sweep();
    }
    CHECK(std::abs(total - 2 * std::numbers::pi) < 1e-9);
    // contiguous, starting at 12 o'clock
    const auto& first = std::get<PieSector>(g.marks[0].shape);
    CHECK(first.start_angle == doctest::Approx(-std::numbers::pi / 2));
    for (std::size_t i = 1; i < 4; ++i)
        CHECK(std::get<PieSector>(g.marks[i].shape).start_angle ==
              doctest::Approx(std::get<PieSector>(g.marks[i - 1].shape).end_angle));
}

TEST_CASE("bar heights are proportional") {
    auto t = fixtures::csv("k,v\na,1\nb,2\n");
    auto spec = fixtures::spec_for(ChartType::bar, t);
    spec.plot_area = Rect{20, 20, 200, 200};
    auto g = derive_geometry(t, spec);
    const auto& a = std::get<BarRect>(g.marks[0].shape);
    const auto& b = std::get<BarRect>(g.marks[1].shape);
    CHECK(b.rect.h == 2 * a.rect.h);
    CHECK(b.rect.h == 200);
    CHECK(a.rect.bottom() == g.baseline_y);
    CHECK(b.rect.bottom() == g.baseline_y);
    CHECK(g.marks[1].rows == std::vector<std::size_t>{1});
}

TEST_CASE("negative bars hang below the baseline") {
    auto t = fixtures::csv("k,v\na,-1\nb,3\n");
    auto spec = fixtures::spec_for(ChartType::bar, t);
    spec.plot_area = Rect{0, 0, 100, 200};
    auto g = derive_geometry(t, spec);
    const auto& a = std::get<BarRect>(g.marks[0].shape);
    const auto& b = std::get<BarRect>(g.marks[1].shape);
    CHECK(a.rect.y == g.baseline_y);
    CHECK(b.rect.bottom() == g.baseline_y);
    CHECK(b.rect.h == 3 * a.rect.h);
}

TEST_CASE("scatter area encodes size") {
    auto t = fixtures::csv("x,y,pop\n1,1,1\n9,9,4\n");
    ChartSpec spec;
    spec.chart_type = ChartType::scatter;
    spec.x_column = "x";
    spec.y_column = "y";
    spec.size_column = "pop";
    spec.canvas = {400, 400};
    auto g = derive_geometry(t, spec);
    const auto& small = std::get<ScatterBubble>(g.marks[0].shape);
    const auto& big = std::get<ScatterBubble>(g.marks[1].shape);
    CHECK(big.radius / small.radius == doctest::Approx(2.0));

    // brute-force area over the render
    auto img = render_plain(g);
    const Rgba mark = RenderStyle{}.mark;
    auto area = [&](const ScatterBubble& b) {
        Rect box{int(b.center.x - b.radius) - 2, int(b.center.y - b.radius) - 2, int(2 * b.radius) + 5,
                 int(2 * b.radius) + 5};
        return double(count_color(img, mark, box.intersect({0, 0, 400, 400})));
    };
    const double ratio = std::sqrt(area(big) / area(small));
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.05));
    CHECK(area(big) == doctest::Approx(std::numbers::pi * big.radius * big.radius).epsilon(0.03));
}

TEST_CASE("bad specs") {
    auto t = fixtures::csv(fixtures::kBarCsv);
    ChartSpec spec = fixtures::spec_for(ChartType::bar, t);
    spec.y_column = "nope";
    CHECK(fixtures::code_of([&] { derive_geometry(t, spec); }) == ErrorCode::ColumnMissing);
    auto neg = fixtures::csv("k,v\na,3\nb,-1\n");
    CHECK(fixtures::code_of([&] { derive_geometry(neg, fixtures::spec_for(ChartType::pie, neg)); }) ==
          ErrorCode::NegativePieValue);
    CHECK(fixtures::code_of([] { chart_type_from_string("radar"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("line points follow x order") {
    auto g = fixtures::geometry(ChartType::line);
    REQUIRE(g.marks.size() == 1);
    const auto& pts = std::get<LinePolyline>(g.marks[0].shape).points;
    REQUIRE(pts.size() == 6);
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].x > pts[i - 1].x);
    // price 11 is the highest point
    CHECK(pts[5].y < pts[3].y);
    // continuous coordinates: the first and last points sit on the plot edges
    CHECK(pts.front().x == g.plot_area.x);
    CHECK(pts.back().x == g.plot_area.right());
    for (const auto& p : pts) {
        CHECK(p.x >= g.plot_area.x);
        CHECK(p.x <= g.plot_area.right());
        CHECK(p.y >= g.plot_area.y);
        CHECK(p.y <= g.plot_area.bottom());
    }
}

TEST_CASE("render: empty marks give background only") {
    ChartGeometry g;
    g.canvas = {32, 24};
    g.plot_area = {0, 0, 32, 24};
    auto img = render_plain(g);
    CHECK(count_color(img, RenderStyle{}.background, {0, 0, 32, 24}) == 32u * 24u);
}

TEST_CASE("render: full-width bar pixel count") {
    ChartGeometry g;
    g.canvas = {64, 80};
    g.plot_area = {0, 0, 64, 80};
    g.baseline_y = 80;
    g.marks.push_back({BarRect{{0, 30, 64, 50}, 1.0}, {0}});
    auto img = render_plain(g);
    CHECK(count_color(img, RenderStyle{}.mark, {0, 0, 64, 80}) == 64u * 50u);
    CHECK(count_color(img, RenderStyle{}.mark, {0, 30, 64, 50}) == 64u * 50u);
}

TEST_CASE("render is deterministic") {
    for (auto type : {ChartType::bar, ChartType::line, ChartType::pie, ChartType::scatter}) {
        auto g = fixtures::geometry(type);
        CHECK(render_plain(g) == render_plain(g));
    }
}

}

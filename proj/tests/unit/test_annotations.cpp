#include "chartforge/annotations.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <string>

using namespace chartforge::chart;

namespace {

std::size_t occurrences(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
    return n;
}

} // namespace

TEST_SUITE("annotations") {

TEST_CASE("titled table has one title element") {
    auto t = chartforge::chart::parse_table(R"({"title":"Desert area","data":[{"r":"a","v":1},{"r":"b","v":2}]})",
                                            TableFormat::json);
    auto spec = fixtures::spec_for(ChartType::bar, t);
    auto svg = export_annotations(derive_geometry(t, spec), t, spec);
    CHECK(occurrences(svg, "id=\"title\"") == 1);
    CHECK(svg.find(">Desert area<") != std::string::npos);
}

TEST_CASE("five-row bar table has five x ticks") {
    auto t = fixtures::csv("k,v\na,1\nb,2\nc,3\nd,4\ne,5\n");
    auto spec = fixtures::spec_for(ChartType::bar, t);
    auto svg = export_annotations(derive_geometry(t, spec), t, spec);
    CHECK(occurrences(svg, "class=\"x-tick\"") == 5);
    CHECK(svg.rfind("<svg", 0) == 0);
}

TEST_CASE("untitled table keeps axes") {
    auto t = fixtures::csv(fixtures::kBarCsv);
    auto spec = fixtures::spec_for(ChartType::bar, t);
    auto svg = export_annotations(derive_geometry(t, spec), t, spec);
    CHECK(occurrences(svg, "id=\"title\"") == 0);
    CHECK(occurrences(svg, "class=\"axis\"") >= 1);
}

TEST_CASE("pie labels and escaping") {
    auto t = fixtures::csv("k,v\n<a&b>,1\nc,3\n");
    auto spec = fixtures::spec_for(ChartType::pie, t);
    auto svg = export_annotations(derive_geometry(t, spec), t, spec);
    CHECK(occurrences(svg, "class=\"slice-label\"") == 2);
    CHECK(svg.find("&lt;a&amp;b&gt;") != std::string::npos);
    CHECK(svg.find("<a&b>") == std::string::npos);
}

}

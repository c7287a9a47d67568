#include "chartforge/png_io.hpp"
#include "chartforge/raster.hpp"

#include "fixtures.hpp"

#include <doctest.h>

using namespace chartforge;

TEST_SUITE("raster") {

TEST_CASE("rect intersection and containment") {
    Rect a{0, 0, 10, 10};
    Rect b{5, 5, 10, 10};
    CHECK(a.intersect(b) == Rect{5, 5, 5, 5});
    CHECK(a.intersect(Rect{20, 20, 3, 3}).empty());
    CHECK(a.contains(9, 9));
    CHECK_FALSE(a.contains(10, 9));
    CHECK(a.inflate(2) == Rect{-2, -2, 14, 14});
}

TEST_CASE("crop and paste") {
    auto img = fixtures::noise_image(20, 12, 1);
    auto part = img.crop({3, 2, 5, 4});
    REQUIRE(part.size() == Size{5, 4});
    CHECK(part.at(0, 0) == img.at(3, 2));
    CHECK(part.at(4, 3) == img.at(7, 5));

    RasterImage canvas(20, 12);
    canvas.paste(part, 3, 2);
    CHECK(canvas.at(7, 5) == img.at(7, 5));
    CHECK(canvas.at(8, 5) == Rgba{});
    canvas.paste(part, 18, 10); // clipped
    CHECK(canvas.at(19, 11) == part.at(1, 1));
}

TEST_CASE("blend_over") {
    Rgba dst{0, 0, 255, 255};
    CHECK(blend_over(dst, {255, 0, 0, 255}) == Rgba{255, 0, 0, 255});
    CHECK(blend_over(dst, {255, 0, 0, 0}) == dst);
    auto half = blend_over(dst, {255, 0, 0, 128});
    CHECK(half.a == 255);
    CHECK(std::abs(int(half.r) - 128) <= 1);
    CHECK(std::abs(int(half.b) - 127) <= 1);
    CHECK(blend_over({}, {10, 20, 30, 40}) == Rgba{10, 20, 30, 40});
}

TEST_CASE("binary mask dilation") {
    BinaryMask m(21, 21);
    m.set(10, 10, true);
    auto d = m.dilate(3);
    std::size_t expected = 0;
    for (int y = 0; y < 21; ++y)
        for (int x = 0; x < 21; ++x) {
            const int dx = x - 10, dy = y - 10;
            const bool in = dx * dx + dy * dy <= 9;
            expected += in;
            CHECK(d.at(x, y) == in);
        }
    CHECK(d.count() == expected);
    CHECK(d.bounding_box() == Rect{7, 7, 7, 7});
    CHECK(BinaryMask(4, 4).bounding_box().empty());
}

TEST_CASE("png round trip is lossless and deterministic") {
    auto img = fixtures::noise_image(33, 17, 9);
    img.set_alpha(0, 0, 0);
    img.set_alpha(5, 5, 77);
    auto bytes = encode_png(img);
    CHECK(bytes == encode_png(img));
    REQUIRE(bytes.size() > 8);
    CHECK(bytes[1] == 'P');
    CHECK(decode_png(bytes) == img);
}

TEST_CASE("png file io") {
    fixtures::TempDir dir;
    auto img = fixtures::noise_image(8, 8, 2);
    write_png(dir.path() / "a.png", img);
    CHECK(read_png(dir.path() / "a.png") == img);
    CHECK(fixtures::code_of([&] { read_png(dir.path() / "missing.png"); }) == ErrorCode::IoError);
    std::vector<std::uint8_t> junk{1, 2, 3};
    CHECK(fixtures::code_of([&] { decode_png(junk); }).has_value());
}

}

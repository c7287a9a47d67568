#include "chartforge/error.hpp"
#include "chartforge/genclient.hpp"
#include "chartforge/wire.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

using namespace chartforge;
using namespace chartforge::gen;

namespace {

GenRequest txt(std::string object, std::uint64_t seed, Size size = {128, 128}) {
    GenRequest r;
    r.prompt_object = std::move(object);
    r.prompt_description = "watercolor style";
    r.seed = seed;
    r.size = size;
    return r;
}

GenRequest img2img(const RasterImage& init, double strength, std::uint64_t seed) {
    GenRequest r = txt("sun", seed, init.size());
    r.mode = GenMode::img2img;
    r.init_image = init;
    r.strength = strength;
    return r;
}

} // namespace

TEST_SUITE("genclient") {

TEST_CASE("mock is deterministic") {
    GenClient client(std::make_shared<MockBackend>());
    auto a = client.generate(txt("sun", 7));
    auto b = client.generate(txt("sun", 7));
    CHECK(a.image == b.image);
    CHECK(a.attention.at("sun").values == b.attention.at("sun").values);
    CHECK(a.backend_id == "mock");
    CHECK(a.seed == 7);
    CHECK_FALSE(client.generate(txt("sun", 8)).image == a.image);
    CHECK_FALSE(client.generate(txt("moon", 7)).image == a.image);
}

TEST_CASE("mock attention forms one blob at the object") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto req = txt("sun", seed, {256, 256});
        auto res = mock_render(req);
        const auto& grid = res.object_attention(req);
        auto mask = attention::threshold_mask(grid);
        auto comps = oracle::component_sizes(mask.bits, grid.side, grid.side);
        REQUIRE(comps.size() == 1);

        const auto blob = mock_blob(req);
        std::size_t arg = 0;
        for (std::size_t i = 1; i < grid.values.size(); ++i)
            if (grid.values[i] > grid.values[arg]) arg = i;
        const int cell_col = int(blob.cx * grid.side / req.size.width);
        const int cell_row = int(blob.cy * grid.side / req.size.height);
        CHECK(int(arg % grid.side) == cell_col);
        CHECK(int(arg / grid.side) == cell_row);
        const int bx = int(blob.cx), by = int(blob.cy);
        CHECK(res.image.at(bx, by).rgb() == blob.color);
    }
}

TEST_CASE("img2img strength extremes") {
    auto init = fixtures::noise_image(96, 96, 3);
    auto zero = mock_render(img2img(init, 0.0, 5));
    CHECK(zero.image == init);
    auto one = mock_render(img2img(init, 1.0, 5));
    CHECK(one.image == mock_render(txt("sun", 5, {96, 96})).image);
    auto mid = mock_render(img2img(init, 0.3, 5));
    const auto a = mid.image.bytes(), b = init.bytes();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(int(a[i]) - int(b[i])) <= 0.3 * 255 + 1);
}

TEST_CASE("request validation") {
    auto bad = txt("sun", 1);
    bad.strength = 0.5;
    CHECK(fixtures::code_of([&] { bad.validate(); }) == ErrorCode::InvalidRequest);
    auto init = fixtures::noise_image(32, 32, 1);
    auto r = img2img(init, 1.5, 1);
    CHECK(fixtures::code_of([&] { r.validate(); }) == ErrorCode::InvalidRequest);
    r = img2img(init, 0.5, 1);
    r.size = {64, 64};
    CHECK(fixtures::code_of([&] { r.validate(); }) == ErrorCode::InvalidRequest);
    r = img2img(init, 0.5, 1);
    r.init_image.reset();
    CHECK(fixtures::code_of([&] { r.validate(); }) == ErrorCode::InvalidRequest);
    CHECK(fixtures::code_of([] { gen_mode_from_string("video"); }) == ErrorCode::InvalidRequest);
}

TEST_CASE("object token and prompt") {
    CHECK(object_token("  Book ") == "book");
    auto r = txt("book", 1);
    CHECK(r.prompt().find("book") != std::string::npos);
    CHECK(r.prompt().find("watercolor style") != std::string::npos);
    GenResult empty;
    CHECK(fixtures::code_of([&] { empty.object_attention(r); }) == ErrorCode::MissingAttention);
}

TEST_CASE("unreachable endpoint") {
    BackendDescriptor d;
    d.endpoint = "http://127.0.0.1:1";
    d.timeout = std::chrono::milliseconds(2000);
    auto start = std::chrono::steady_clock::now();
    CHECK(fixtures::code_of([&] { generate(txt("sun", 1), d); }) == ErrorCode::BackendUnreachable);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(5));
}

TEST_CASE("http backend round trip") {
    fixtures::StubServer stub;
    stub.on("/generate", [](const std::string& body, int& status, std::string& reply) {
        auto req = wire::request_from_json(nlohmann::json::parse(body));
        reply = wire::result_to_json(mock_render(req)).dump();
        status = 200;
    });
    BackendDescriptor d;
    d.endpoint = stub.start();
    GenClient client(d);
    auto req = txt("kite", 4, {64, 64});
    auto res = client.generate(req);
    auto local = mock_render(req);
    CHECK(res.image == local.image);
    CHECK(res.attention.at("kite").values == local.attention.at("kite").values);
}

TEST_CASE("http backend errors") {
    fixtures::StubServer stub;
    stub.on("/generate", [](const std::string& body, int& status, std::string& reply) {
        auto j = nlohmann::json::parse(body);
        const std::string obj = j.at("prompt_object");
        if (obj == "bad") {
            status = 400;
            reply = "{}";
        } else if (obj == "slow") {
            std::this_thread::sleep_for(std::chrono::milliseconds(1500));
            status = 200;
            reply = "{}";
        } else if (obj == "blind") {
            auto res = mock_render(wire::request_from_json(j));
            res.attention.clear();
            reply = wire::result_to_json(res).dump();
            status = 200;
        } else {
            status = 500;
            reply = "oops";
        }
    });
    BackendDescriptor d;
    d.endpoint = stub.start();
    d.timeout = std::chrono::milliseconds(300);
    CHECK(fixtures::code_of([&] { generate(txt("bad", 1, {32, 32}), d); }) == ErrorCode::InvalidRequest);
    CHECK(fixtures::code_of([&] { generate(txt("slow", 1, {32, 32}), d); }) == ErrorCode::BackendTimeout);
    CHECK(fixtures::code_of([&] { generate(txt("blind", 1, {32, 32}), d); }) == ErrorCode::MissingAttention);
    CHECK(fixtures::code_of([&] { generate(txt("other", 1, {32, 32}), d); }) == ErrorCode::BackendUnreachable);
}

TEST_CASE("concurrency cap") {
    struct Counting : Backend {
        std::atomic<int> active{0}, peak{0};
        GenResult run(const GenRequest& r) override {
            const int now = ++active;
            int p = peak.load();
            while (now > p && !peak.compare_exchange_weak(p, now)) {}
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
            --active;
            return mock_render(r);
        }
        std::string id() const override { return "counting"; }
    };
    auto backend = std::make_shared<Counting>();
    GenClient client(backend, 2);
    std::vector<std::thread> threads;
    for (int i = 0; i < 6; ++i) threads.emplace_back([&, i] { client.generate(txt("sun", i, {32, 32})); });
    for (auto& t : threads) t.join();
    CHECK(backend->peak.load() <= 2);
    CHECK(backend->peak.load() >= 1);
    CHECK(fixtures::code_of([&] { GenClient(backend, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("descriptor defaults to the mock") {
    BackendDescriptor d;
    CHECK(d.is_mock());
    CHECK(make_backend(d)->id() == "mock");
    d.max_concurrent = 0;
    CHECK(fixtures::code_of([&] { d.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("http providers") {
    fixtures::StubServer stub;
    stub.on("/keywords", [](const std::string&, int& status, std::string& reply) {
        status = 200;
        reply = R"({"keywords":[{"term":"desert","score":0.9},{"term":"sand","score":0.4}]})";
    });
    stub.on("/segment", [](const std::string& body, int& status, std::string& reply) {
        auto img = wire::image_from_base64(nlohmann::json::parse(body).at("image").get<std::string>());
        RasterImage matte(img.width(), img.height(), {0, 0, 0, 200});
        reply = nlohmann::json{{"alpha", wire::image_to_base64(matte)}}.dump();
        status = 200;
    });
    BackendDescriptor d;
    d.endpoint = stub.start();
    HttpKeywordProvider kw(d);
    auto set = semantics::extract_keywords("Desert sand", kw);
    REQUIRE(set.keywords.size() == 2);
    CHECK(set.keywords[0].term == "desert");
    HttpSegmentationProvider seg(d);
    auto matte = seg.alpha_matte(fixtures::noise_image(8, 8, 1));
    REQUIRE(matte.size() == 64);
    CHECK(matte[5] == 200);

    BackendDescriptor dead;
    dead.endpoint = "http://127.0.0.1:1";
    CHECK(fixtures::code_of([&] { HttpKeywordProvider(dead).score_terms("x"); }) == ErrorCode::ProviderUnavailable);
    CHECK(fixtures::code_of([&] { HttpSegmentationProvider(dead).alpha_matte(RasterImage(2, 2)); }) ==
          ErrorCode::ProviderUnavailable);
}

}

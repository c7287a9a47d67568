#include "chartforge/http_api.hpp"
#include "chartforge/png_io.hpp"

#include "fixtures.hpp"

#include <doctest.h>
#include <httplib.h>

#include <thread>

using namespace chartforge;
using namespace chartforge::server;
using nlohmann::json;

namespace {

struct Running {
    fixtures::TempDir dir;
    std::unique_ptr<Studio> studio;
    std::unique_ptr<HttpService> service;
    std::thread thread;
    int port = 0;

    Running() {
        StudioOptions o;
        o.data_dir = dir.path();
        studio = std::make_unique<Studio>(o);
        service = std::make_unique<HttpService>(*studio);
        port = service->bind_any_port("127.0.0.1");
        thread = std::thread([this] { service->listen_after_bind(); });
        service->wait_until_ready();
    }
    ~Running() {
        service->stop();
        thread.join();
    }
    httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

json body_of(const httplib::Result& r) { return json::parse(r->body); }

std::string create(httplib::Client& c, const std::string& data, const std::string& type, int side = 128) {
    json req{{"data", data}, {"format", "csv"}, {"spec", {{"chart_type", type}, {"canvas", {side, side}}}}};
    auto r = c.Post("/projects", req.dump(), "application/json");
    REQUIRE(r);
    REQUIRE(r->status == 201);
    return body_of(r).at("id").get<std::string>();
}

} // namespace

TEST_SUITE("http") {

TEST_CASE("status mapping") {
    CHECK(http_status(ErrorCode::NotFound) == 404);
    CHECK(http_status(ErrorCode::MalformedInput) == 400);
    CHECK(http_status(ErrorCode::InvalidPlan) == 422);
    CHECK(http_status(ErrorCode::BackendUnreachable) == 502);
    CHECK(http_status(ErrorCode::BackendTimeout) == 504);
    CHECK(http_status(ErrorCode::IoError) == 500);
}

TEST_CASE("project lifecycle") {
    Running srv;
    auto c = srv.client();
    const auto id = create(c, fixtures::kBarCsv, "bar");
    const auto id2 = create(c, fixtures::kBarCsv, "bar");
    CHECK(id != id2);

    auto got = c.Get("/projects/" + id);
    REQUIRE(got);
    CHECK(got->status == 200);
    auto p = body_of(got);
    CHECK(p.at("id") == id);
    CHECK(p.at("table").at("rows").size() == 4);
    const std::string preview = p.at("preview_asset");

    auto asset = c.Get("/assets/" + preview);
    REQUIRE(asset);
    CHECK(asset->status == 200);
    CHECK(asset->get_header_value("Content-Type") == "image/png");
    std::vector<std::uint8_t> bytes(asset->body.begin(), asset->body.end());
    CHECK(decode_png(bytes).size() == Size{128, 128});

    auto sem = c.Get("/projects/" + id + "/semantics");
    REQUIRE(sem);
    CHECK(sem->status == 200);
    CHECK(body_of(sem).at("keywords").empty());

    auto gen = c.Post("/projects/" + id + "/generate",
                      json{{"object", "book"}, {"description", "pile"}, {"target", "fg"}, {"method", "uncond"}, {"seed", 2}}.dump(),
                      "application/json");
    REQUIRE(gen);
    REQUIRE(gen->status == 201);
    const std::string entry = body_of(gen).at("id");

    auto rep = c.Post("/projects/" + id + "/replicate", json{{"entry", entry}}.dump(), "application/json");
    REQUIRE(rep);
    CHECK(rep->status == 201);
    CHECK(body_of(rep).at("assets").size() == 4); // one per bar

    auto ref = c.Post("/projects/" + id + "/refine", json{{"strength", 0.2}, {"seed", 1}}.dump(), "application/json");
    REQUIRE(ref);
    CHECK(ref->status == 201);

    auto ev = c.Post("/projects/" + id + "/evaluate", "{}", "application/json");
    REQUIRE(ev);
    CHECK(ev->status == 200);
    CHECK(body_of(ev).contains("global_score"));

    auto ex = c.Post("/projects/" + id + "/export", json{{"format", "png"}}.dump(), "application/json");
    REQUIRE(ex);
    CHECK(ex->status == 200);
    CHECK(ex->get_header_value("Content-Type") == "image/png");

    auto kept = c.Post("/projects/" + id + "/gallery/" + entry, json{{"kept", false}}.dump(), "application/json");
    REQUIRE(kept);
    CHECK(kept->status == 200);
    CHECK(body_of(kept).at("kept") == false);

    auto layers = body_of(c.Get("/projects/" + id)).at("layers");
    layers[0]["visible"] = false;
    auto put = c.Put("/projects/" + id + "/layers", json{{"layers", layers}}.dump(), "application/json");
    REQUIRE(put);
    CHECK(put->status == 200);
    CHECK(body_of(c.Get("/projects/" + id)).at("layers")[0].at("visible") == false);
}

TEST_CASE("errors carry codes") {
    Running srv;
    auto c = srv.client();
    auto bad = c.Post("/projects", json{{"data", "a,b\n1,2,3\n"}, {"format", "csv"}}.dump(), "application/json");
    REQUIRE(bad);
    CHECK(bad->status >= 400);
    CHECK(bad->status < 500);
    CHECK(body_of(bad).at("error") == "MalformedInput");

    auto missing = c.Get("/projects/deadbeef");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    CHECK(body_of(missing).at("error") == "NotFound");

    CHECK(c.Get("/assets/nope_0001")->status == 404);

    const auto pie = create(c, fixtures::kPieCsv, "pie");
    auto gen = c.Post("/projects/" + pie + "/generate", json{{"object", "apple"}, {"method", "uncond"}}.dump(),
                      "application/json");
    REQUIRE(gen->status == 201);
    auto rep = c.Post("/projects/" + pie + "/replicate", json{{"entry", body_of(gen).at("id")}}.dump(), "application/json");
    CHECK(rep->status == 422);
    CHECK(body_of(rep).at("error") == "UnsupportedChartType");

    auto fmt = c.Post("/projects/" + pie + "/export", json{{"format", "gif"}}.dump(), "application/json");
    CHECK(body_of(fmt).at("error") == "UnsupportedFormat");
    CHECK(fmt->status >= 400);

    auto junk = c.Post("/projects/" + pie + "/generate", "{not json", "application/json");
    CHECK(junk->status == 400);
}

}

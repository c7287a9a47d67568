#include "fixtures.hpp"

#include "chartforge/error.hpp"

#include <httplib.h>

#include <iomanip>
#include <map>
#include <sstream>

namespace fixtures {

cf::chart::DataTable csv(const std::string& text) { return cf::chart::parse_table(text, cf::chart::TableFormat::csv); }

const char* data_for(cf::chart::ChartType type) {
    switch (type) {
    case cf::chart::ChartType::bar: return kBarCsv;
    case cf::chart::ChartType::line: return kLineCsv;
    case cf::chart::ChartType::pie: return kPieCsv;
    case cf::chart::ChartType::scatter: return kScatterCsv;
    }
    return kBarCsv;
}

cf::chart::ChartSpec spec_for(cf::chart::ChartType type, const cf::chart::DataTable& table, int side) {
    cf::chart::ChartSpec spec;
    spec.chart_type = type;
    spec.canvas = {side, side};
    if (type == cf::chart::ChartType::scatter) {
        spec.x_column = "x";
        spec.y_column = "y";
        spec.size_column = "pop";
    }
    return cf::chart::with_default_columns(spec, table);
}

cf::chart::ChartGeometry geometry(cf::chart::ChartType type, int side) {
    const auto table = csv(data_for(type));
    return cf::chart::derive_geometry(table, spec_for(type, table, side));
}

TempDir::TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    std::ostringstream name;
    name << "chartforge-test-" << std::hex << rng();
    path_ = std::filesystem::temp_directory_path() / name.str();
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::string embedding_text(const std::vector<std::string>& words, const std::vector<std::vector<double>>& vecs,
                           const std::vector<std::uint64_t>& freqs, bool header) {
    std::ostringstream os;
    os << std::setprecision(9);
    if (header) os << words.size() << ' ' << (vecs.empty() ? 0 : vecs[0].size()) << '\n';
    for (std::size_t i = 0; i < words.size(); ++i) {
        os << words[i];
        for (double v : vecs[i]) os << ' ' << v;
        os << ' ' << freqs[i] << '\n';
    }
    return os.str();
}

struct StubServer::Impl {
    httplib::Server server;
    std::thread thread;
    int port = 0;
};

StubServer::StubServer() : impl_(std::make_unique<Impl>()) {}

StubServer::~StubServer() {
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

void StubServer::on(const std::string& path, Handler handler) {
    impl_->server.Post(path, [handler](const httplib::Request& req, httplib::Response& res) {
        int status = 200;
        std::string reply;
        handler(req.body, status, reply);
        res.status = status;
        res.set_content(reply, "application/json");
    });
}

std::string StubServer::start() {
    impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return "http://127.0.0.1:" + std::to_string(impl_->port);
}

cf::RasterImage noise_image(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    cf::RasterImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const auto v = rng();
            img.set(x, y, {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v >> 16), 255});
        }
    return img;
}

} // namespace fixtures

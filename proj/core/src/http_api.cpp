#include "chartforge/http_api.hpp"

#include "chartforge/wire.hpp"

#include <httplib.h>

namespace chartforge::server {

int http_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::MalformedInput:
    case ErrorCode::NoNumericColumn:
    case ErrorCode::EmptyTable:
    case ErrorCode::ColumnMissing:
    case ErrorCode::MissingValue:
    case ErrorCode::NegativePieValue:
    case ErrorCode::MalformedLine:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidRequest:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::InvalidArgument:
    case ErrorCode::NonSquareImage:
    case ErrorCode::SizeMismatch: return 400;
    case ErrorCode::IncompatibleVariant:
    case ErrorCode::IntegrityViolated:
    case ErrorCode::UnknownWord:
    case ErrorCode::EmptyMask:
    case ErrorCode::TooShort:
    case ErrorCode::EmptyForeground:
    case ErrorCode::MarkNotFound:
    case ErrorCode::NoEdgesFound:
    case ErrorCode::UnsupportedChartType:
    case ErrorCode::InvalidPlan:
    case ErrorCode::NoLayers: return 422;
    case ErrorCode::BackendUnreachable:
    case ErrorCode::MissingAttention:
    case ErrorCode::ProviderUnavailable: return 502;
    case ErrorCode::BackendTimeout: return 504;
    case ErrorCode::IoError: return 500;
    }
    return 500;
}

namespace {

using wire::json;

json table_json(const chart::DataTable& t) {
    json cols = json::array();
    for (const auto& c : t.columns) cols.push_back({{"name", c.name}, {"kind", chart::to_string(c.kind)}});
    json rows = json::array();
    for (std::size_t r = 0; r < t.row_count(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            const auto& cell = t.rows[r][c];
            if (std::holds_alternative<double>(cell)) row.push_back(std::get<double>(cell));
            else if (std::holds_alternative<std::string>(cell)) row.push_back(std::get<std::string>(cell));
            else row.push_back(nullptr);
        }
        rows.push_back(std::move(row));
    }
    return {{"columns", cols}, {"rows", rows}};
}

json project_json(const Project& p) {
    json j = to_json(p);
    j["table"] = table_json(p.table);
    return j;
}

json semantics_json(const SemanticsView& v) {
    json kws = json::array();
    for (const auto& k : v.keywords.keywords) kws.push_back({{"term", k.term}, {"score", k.score}});
    json related = json::object();
    for (const auto& [term, list] : v.related) {
        json arr = json::array();
        for (const auto& r : list)
            arr.push_back({{"term", r.term}, {"similarity", r.similarity}, {"frequency", r.frequency}, {"rank", r.rank}});
        related[term] = arr;
    }
    return {{"keywords", kws}, {"related", related}};
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        return json::parse(req.body);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::MalformedInput, std::string("request body: ") + e.what());
    }
}

void send_json(httplib::Response& res, const json& j, int status = 200) {
    res.status = status;
    res.set_content(j.dump(), "application/json");
}

template <typename F>
httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const Error& e) {
            send_json(res, {{"error", to_string(e.code())}, {"message", e.what()}}, http_status(e.code()));
        } catch (const json::exception& e) {
            send_json(res, {{"error", "InvalidArgument"}, {"message", e.what()}}, 400);
        } catch (const std::exception& e) {
            send_json(res, {{"error", "Internal"}, {"message", e.what()}}, 500);
        }
    };
}

std::optional<modify::ReplicationPlan> plan_from_json(const json& j) {
    if (!j.contains("plan") || j["plan"].is_null()) return std::nullopt;
    const json& p = j["plan"];
    modify::ReplicationPlan plan;
    plan.source_bar = p.at("source_bar").get<std::size_t>();
    plan.slice_count = p.value("slice_count", modify::kDefaultSliceCount);
    for (const auto& t : p.at("targets")) plan.targets.emplace_back(t.at(0).get<std::size_t>(), t.at(1).get<int>());
    return plan;
}

} // namespace

struct HttpService::Impl {
    Studio& studio;
    httplib::Server server;

    explicit Impl(Studio& s) : studio(s) { routes(); }

    void routes() {
        server.Post("/projects", guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const json body = parse_body(req);
                        const auto format = chart::table_format_from_string(body.value("format", std::string{"csv"}));
                        const chart::ChartSpec spec = spec_from_json(body.value("spec", json::object()));
                        std::optional<std::string> title;
                        if (body.contains("title") && !body["title"].is_null()) title = body["title"].get<std::string>();
                        const Project p = studio.create_project(body.at("data").get<std::string>(), format, spec, title);
                        send_json(res, project_json(p), 201);
                    }));
        server.Get(R"(/projects/([A-Za-z0-9]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
                       send_json(res, project_json(studio.project(req.matches[1])));
                   }));
        server.Get(R"(/projects/([A-Za-z0-9]+)/semantics)",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       send_json(res, semantics_json(studio.semantics(req.matches[1])));
                   }));
        server.Post(R"(/projects/([A-Za-z0-9]+)/generate)",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const GalleryEntry e = studio.generate(req.matches[1], options_from_json(parse_body(req)));
                        send_json(res, to_json(e), 201);
                    }));
        server.Post(R"(/projects/([A-Za-z0-9]+)/replicate)",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const json body = parse_body(req);
                        const auto assets =
                            studio.replicate(req.matches[1], body.at("entry").get<std::string>(), plan_from_json(body));
                        json arr = json::array();
                        for (const auto& [mark, asset] : assets) arr.push_back({{"mark", mark}, {"asset", asset}});
                        send_json(res, {{"assets", arr}}, 201);
                    }));
        server.Post(R"(/projects/([A-Za-z0-9]+)/refine)",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const json body = parse_body(req);
                        const std::string asset = studio.refine(req.matches[1], body.value("strength", 0.3),
                                                                body.value("seed", std::uint64_t{0}));
                        send_json(res, {{"asset", asset}}, 201);
                    }));
        server.Post(R"(/projects/([A-Za-z0-9]+)/evaluate)",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const json body = parse_body(req);
                        std::optional<std::string> layer;
                        if (body.contains("layer") && !body["layer"].is_null()) layer = body["layer"].get<std::string>();
                        send_json(res, eval::to_json(studio.evaluate(req.matches[1], layer)));
                    }));
        server.Post(R"(/projects/([A-Za-z0-9]+)/export)",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const json body = parse_body(req);
                        const ExportResult out = studio.export_project(req.matches[1], body.value("format", std::string{"png"}));
                        res.set_content(std::string(out.bytes.begin(), out.bytes.end()), out.content_type);
                    }));
        server.Put(R"(/projects/([A-Za-z0-9]+)/layers)",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const json body = parse_body(req);
                       const LayerStack s = studio.set_layers(req.matches[1], layer_stack_from_json(body.at("layers")));
                       send_json(res, {{"layers", to_json(s)}});
                   }));
        server.Post(R"(/projects/([A-Za-z0-9]+)/gallery/([A-Za-z0-9_]+))",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const json body = parse_body(req);
                        send_json(res, to_json(studio.set_kept(req.matches[1], req.matches[2], body.at("kept").get<bool>())));
                    }));
        server.Get(R"(/assets/([A-Za-z0-9_]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const auto a = studio.asset(req.matches[1]);
                       res.set_content(std::string(a.bytes.begin(), a.bytes.end()), a.content_type);
                   }));
    }
};

HttpService::HttpService(Studio& studio) : impl_(std::make_unique<Impl>(studio)) {}
HttpService::~HttpService() = default;

bool HttpService::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int HttpService::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool HttpService::listen_after_bind() { return impl_->server.listen_after_bind(); }
void HttpService::stop() { impl_->server.stop(); }
void HttpService::wait_until_ready() const { impl_->server.wait_until_ready(); }

} // namespace chartforge::server

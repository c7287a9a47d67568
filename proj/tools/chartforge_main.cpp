// chartforge command line: one-shot generation and the HTTP service.

#include "chartforge/error.hpp"
#include "chartforge/genclient.hpp"
#include "chartforge/geometry.hpp"
#include "chartforge/http_api.hpp"
#include "chartforge/pipeline.hpp"
#include "chartforge/png_io.hpp"
#include "chartforge/semantics.hpp"
#include "chartforge/studio.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>

namespace {

using namespace chartforge;

struct GenArgs {
    std::string data;
    std::string format;
    std::string type = "bar";
    std::string x, y, size_col;
    std::string object;
    std::string desc;
    std::string target = "fg";
    std::string method = "cond";
    std::string variant;
    std::string out = "out.png";
    std::uint64_t seed = 0;
    int width = 512;
    int height = 512;
};

int run_gen(const GenArgs& a) {
    const auto bytes = read_file(a.data);
    const std::string text(bytes.begin(), bytes.end());
    chart::TableFormat format = chart::TableFormat::csv;
    if (!a.format.empty()) format = chart::table_format_from_string(a.format);
    else if (a.data.size() >= 5 && a.data.substr(a.data.size() - 5) == ".json") format = chart::TableFormat::json;

    const chart::DataTable table = chart::parse_table(text, format);
    chart::ChartSpec spec;
    spec.chart_type = chart::chart_type_from_string(a.type);
    spec.x_column = a.x;
    spec.y_column = a.y;
    if (!a.size_col.empty()) spec.size_column = a.size_col;
    spec.canvas = {a.width, a.height};
    spec = chart::with_default_columns(spec, table);
    spec.validate(table);
    const chart::ChartGeometry geometry = chart::derive_geometry(table, spec);

    server::GenerationOptions options;
    options.object = a.object;
    options.description = a.desc;
    options.target = server::gen_target_from_string(a.target);
    options.method = server::gen_method_from_string(a.method);
    if (!a.variant.empty()) options.mask_variant = chart::mask_variant_from_string(a.variant);
    options.seed = a.seed;

    gen::GenClient client(gen::descriptor_from_environment());
    const server::FlowOutput out = server::run_flow(geometry, options, client);
    write_png(a.out, out.image);
    std::cout << a.out << " " << out.image.width() << "x" << out.image.height() << " backend=" << client.backend().id()
              << "\n";
    return 0;
}

server::HttpService* g_service = nullptr;

void on_signal(int) {
    if (g_service) g_service->stop();
}

int run_serve(const std::string& host, int port, const std::string& data_dir, const std::string& embeddings) {
    server::StudioOptions options = server::options_from_environment();
    if (!data_dir.empty()) options.data_dir = data_dir;
    if (!embeddings.empty()) {
        options.corpus = std::make_shared<semantics::EmbeddingTable>(semantics::load_embeddings_file(embeddings));
        options.keywords = std::make_shared<semantics::RarityKeywordProvider>(options.corpus.get());
    }
    server::Studio studio(options);
    server::HttpService service(studio);
    g_service = &service;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on " << host << ":" << port << " (data: " << options.data_dir.string()
              << ", backend: " << studio.client().backend().id() << ")" << std::endl;
    if (!service.listen(host, port)) {
        std::cerr << "cannot bind " << host << ":" << port << "\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"chartforge: pictorial chart generation"};
    app.require_subcommand(1);

    GenArgs g;
    auto* gen = app.add_subcommand("gen", "Run one generation flow and write the result as PNG");
    gen->add_option("--data", g.data, "CSV or JSON data file")->required()->check(CLI::ExistingFile);
    gen->add_option("--format", g.format, "csv or json (default: from extension)");
    gen->add_option("--type", g.type, "bar, line, pie or scatter");
    gen->add_option("--x", g.x, "category / x column");
    gen->add_option("--y", g.y, "value column");
    gen->add_option("--size", g.size_col, "bubble size column (scatter)");
    gen->add_option("--object", g.object, "object prompt")->required();
    gen->add_option("--desc", g.desc, "description prompt");
    gen->add_option("--target", g.target, "fg or bg");
    gen->add_option("--method", g.method, "cond or uncond");
    gen->add_option("--variant", g.variant, "mask variant for conditional flows");
    gen->add_option("--seed", g.seed, "generation seed");
    gen->add_option("--width", g.width, "canvas width");
    gen->add_option("--height", g.height, "canvas height");
    gen->add_option("--out", g.out, "output PNG path");

    std::string host = "0.0.0.0", data_dir, embeddings;
    int port = 8080;
    if (const char* p = std::getenv("CHARTFORGE_PORT"); p && *p) port = std::atoi(p);
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--host", host, "bind address");
    serve->add_option("--port", port, "port (default: CHARTFORGE_PORT or 8080)");
    serve->add_option("--data-dir", data_dir, "project storage (default: CHARTFORGE_DATA_DIR)");
    serve->add_option("--embeddings", embeddings, "word embedding file for related terms");

    CLI11_PARSE(app, argc, argv);
    try {
        if (gen->parsed()) return run_gen(g);
        return run_serve(host, port, data_dir, embeddings);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

#pragma once

#include "chartforge/error.hpp"
#include "chartforge/geometry.hpp"
#include "chartforge/raster.hpp"
#include "chartforge/table.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <thread>

namespace fixtures {

namespace cf = chartforge;

inline constexpr const char* kBarCsv = "fruit,sales\napple,12\nbanana,30\ncherry,21\ndate,8\n";
inline constexpr const char* kLineCsv = "year,price\n2015,3\n2016,5\n2017,4\n2018,8\n2019,7\n2020,11\n";
inline constexpr const char* kPieCsv = "part,share\na,40\nb,25\nc,20\nd,15\n";
inline constexpr const char* kScatterCsv = "x,y,pop\n1,2,10\n3,7,40\n5,4,20\n8,9,90\n";

/// Code of the chartforge::Error thrown by `f`, or nullopt when it returns.
template <class F>
std::optional<cf::ErrorCode> code_of(F&& f) {
    try {
        f();
    } catch (const cf::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

cf::chart::DataTable csv(const std::string& text);

/// Geometry of one of the bundled data sets on a square canvas.
cf::chart::ChartGeometry geometry(cf::chart::ChartType type, int side = 256);
cf::chart::ChartSpec spec_for(cf::chart::ChartType type, const cf::chart::DataTable& table, int side = 256);
const char* data_for(cf::chart::ChartType type);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

/// Word-per-line embedding text: word, `dim` components, frequency.
std::string embedding_text(const std::vector<std::string>& words, const std::vector<std::vector<double>>& vecs,
                           const std::vector<std::uint64_t>& freqs, bool header = false);

/// Small HTTP server on 127.0.0.1 serving one handler per path; runs on a
/// background thread until destroyed.
class StubServer {
  public:
    using Handler = std::function<void(const std::string& body, int& status, std::string& reply)>;
    StubServer();
    ~StubServer();
    void on(const std::string& path, Handler handler);
    /// Starts listening; returns "http://127.0.0.1:<port>".
    std::string start();

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Image filled with seeded random colours.
cf::RasterImage noise_image(int w, int h, std::uint64_t seed);

} // namespace fixtures

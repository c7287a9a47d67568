#pragma once

#include "chartforge/attention.hpp"
#include "chartforge/raster.hpp"
#include "chartforge/semantics.hpp"

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>

namespace chartforge::gen {

enum class GenMode { txt2img, img2img };

std::string_view to_string(GenMode mode);
GenMode gen_mode_from_string(std::string_view name);

struct GenRequest {
    std::string prompt_object;
    std::string prompt_description;
    GenMode mode = GenMode::txt2img;
    std::optional<RasterImage> init_image;
    std::optional<double> strength;
    std::uint64_t seed = 0;
    Size size{512, 512};

    /// img2img needs an init image of the requested size and a strength in
    /// [0, 1]; txt2img takes neither. Throws InvalidRequest.
    void validate() const;
    /// Full prompt text, "object, description".
    std::string prompt() const;
};

struct GenResult {
    RasterImage image;
    std::map<std::string, attention::AttentionGrid> attention;
    std::string backend_id;
    std::uint64_t seed = 0;

    /// Grid of the prompt object's token. Throws MissingAttention.
    const attention::AttentionGrid& object_attention(const GenRequest& request) const;
};

/// Key under which backends report the object's attention: the object prompt,
/// trimmed and lower-cased.
std::string object_token(std::string_view prompt_object);

/// Checks image size, attention presence and grid values. Throws
/// MissingAttention or InvalidRequest.
void validate_result(const GenRequest& request, const GenResult& result);

struct BackendDescriptor {
    std::string endpoint; // empty or "mock" selects the mock backend
    std::chrono::milliseconds timeout{60000};
    int max_concurrent = 1;

    void validate() const;
    bool is_mock() const { return endpoint.empty() || endpoint == "mock"; }
};

class Backend {
  public:
    virtual ~Backend() = default;
    virtual GenResult run(const GenRequest& request) = 0;
    virtual std::string id() const = 0;
};

/// Where the mock draws its object for a request.
struct MockBlob {
    double cx = 0;
    double cy = 0;
    double radius = 0;
    Rgb color;
};

MockBlob mock_blob(const GenRequest& request);

/// Deterministic procedural backend: a hash-coloured blob on a textured
/// background, attention as a Gaussian bump over the blob. img2img blends the
/// init image toward the procedural image by `strength`.
GenResult mock_render(const GenRequest& request);

class MockBackend final : public Backend {
  public:
    GenResult run(const GenRequest& request) override;
    std::string id() const override { return "mock"; }
};

/// JSON-over-HTTP backend; POSTs to {endpoint}/generate.
class HttpBackend final : public Backend {
  public:
    explicit HttpBackend(BackendDescriptor descriptor);
    GenResult run(const GenRequest& request) override;
    std::string id() const override { return descriptor_.endpoint; }

  private:
    BackendDescriptor descriptor_;
};

std::shared_ptr<Backend> make_backend(const BackendDescriptor& descriptor);

/// Reads CHARTFORGE_BACKEND_URL (absent: mock).
BackendDescriptor descriptor_from_environment();

/// Bounded-concurrency front for a backend. Every result passes
/// validate_result before it is returned.
class GenClient {
  public:
    explicit GenClient(std::shared_ptr<Backend> backend, int max_concurrent = 1);
    explicit GenClient(const BackendDescriptor& descriptor);

    GenResult generate(const GenRequest& request);
    const Backend& backend() const { return *backend_; }
    int max_concurrent() const { return max_concurrent_; }

  private:
    std::shared_ptr<Backend> backend_;
    int max_concurrent_;
    std::unique_ptr<std::counting_semaphore<>> slots_;
};

/// One-shot convenience wrapper.
GenResult generate(const GenRequest& request, const BackendDescriptor& backend);

/// Keyword scoring delegated to {endpoint}/keywords.
class HttpKeywordProvider final : public semantics::KeywordProvider {
  public:
    explicit HttpKeywordProvider(BackendDescriptor descriptor) : descriptor_(std::move(descriptor)) {}
    std::vector<semantics::Keyword> score_terms(std::string_view title) const override;

  private:
    BackendDescriptor descriptor_;
};

/// Matting delegated to {endpoint}/segment.
class HttpSegmentationProvider final : public attention::SegmentationProvider {
  public:
    explicit HttpSegmentationProvider(BackendDescriptor descriptor) : descriptor_(std::move(descriptor)) {}
    std::vector<std::uint8_t> alpha_matte(const RasterImage& image) const override;

  private:
    BackendDescriptor descriptor_;
};

} // namespace chartforge::gen

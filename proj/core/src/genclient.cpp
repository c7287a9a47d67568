#include "chartforge/genclient.hpp"

#include "chartforge/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

namespace chartforge::gen {

std::string_view to_string(GenMode mode) { return mode == GenMode::txt2img ? "txt2img" : "img2img"; }

GenMode gen_mode_from_string(std::string_view name) {
    if (name == "txt2img") return GenMode::txt2img;
    if (name == "img2img") return GenMode::img2img;
    throw Error(ErrorCode::InvalidRequest, "unknown generation mode '" + std::string(name) + "'");
}

void GenRequest::validate() const {
    if (size.width <= 0 || size.height <= 0) throw Error(ErrorCode::InvalidRequest, "size must be positive");
    if (mode == GenMode::txt2img) {
        if (init_image) throw Error(ErrorCode::InvalidRequest, "txt2img takes no init image");
        if (strength) throw Error(ErrorCode::InvalidRequest, "txt2img takes no strength");
        return;
    }
    if (!init_image) throw Error(ErrorCode::InvalidRequest, "img2img requires an init image");
    if (!strength) throw Error(ErrorCode::InvalidRequest, "img2img requires a strength");
    if (!(*strength >= 0.0 && *strength <= 1.0)) throw Error(ErrorCode::InvalidRequest, "strength must be in [0, 1]");
    if (init_image->size() != size) throw Error(ErrorCode::InvalidRequest, "init image size differs from requested size");
}

std::string GenRequest::prompt() const {
    if (prompt_description.empty()) return prompt_object;
    return prompt_object + ", " + prompt_description;
}

std::string object_token(std::string_view prompt_object) {
    std::size_t b = 0, e = prompt_object.size();
    while (b < e && std::isspace(static_cast<unsigned char>(prompt_object[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(prompt_object[e - 1]))) --e;
    std::string out(prompt_object.substr(b, e - b));
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

const attention::AttentionGrid& GenResult::object_attention(const GenRequest& request) const {
    const auto it = attention.find(object_token(request.prompt_object));
    if (it == attention.end())
        throw Error(ErrorCode::MissingAttention, "no attention grid for '" + request.prompt_object + "'");
    return it->second;
}

void validate_result(const GenRequest& request, const GenResult& result) {
    if (result.image.size() != request.size)
        throw Error(ErrorCode::InvalidRequest, "backend returned an image of the wrong size");
    const auto& grid = result.object_attention(request);
    grid.validate();
    for (const auto& [token, g] : result.attention) g.validate();
}

void BackendDescriptor::validate() const {
    if (max_concurrent < 1) throw Error(ErrorCode::InvalidArgument, "max_concurrent must be >= 1");
    if (timeout.count() <= 0) throw Error(ErrorCode::InvalidArgument, "timeout must be positive");
}

GenResult MockBackend::run(const GenRequest& request) { return mock_render(request); }

std::shared_ptr<Backend> make_backend(const BackendDescriptor& descriptor) {
    descriptor.validate();
    if (descriptor.is_mock()) return std::make_shared<MockBackend>();
    return std::make_shared<HttpBackend>(descriptor);
}

BackendDescriptor descriptor_from_environment() {
    BackendDescriptor d;
    if (const char* url = std::getenv("CHARTFORGE_BACKEND_URL"); url && *url) d.endpoint = url;
    return d;
}

GenClient::GenClient(std::shared_ptr<Backend> backend, int max_concurrent)
    : backend_(std::move(backend)), max_concurrent_(max_concurrent) {
    if (!backend_) throw Error(ErrorCode::InvalidArgument, "null backend");
    if (max_concurrent < 1) throw Error(ErrorCode::InvalidArgument, "max_concurrent must be >= 1");
    slots_ = std::make_unique<std::counting_semaphore<>>(max_concurrent);
}

GenClient::GenClient(const BackendDescriptor& descriptor)
    : GenClient(make_backend(descriptor), descriptor.max_concurrent) {}

GenResult GenClient::generate(const GenRequest& request) {
    request.validate();
    slots_->acquire();
    struct Release {
        std::counting_semaphore<>* s;
        ~Release() { s->release(); }
    } release{slots_.get()};
    GenResult result = backend_->run(request);
    validate_result(request, result);
    return result;
}

GenResult generate(const GenRequest& request, const BackendDescriptor& backend) {
    GenClient client(backend);
    return client.generate(request);
}

} // namespace chartforge::gen

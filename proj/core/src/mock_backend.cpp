#include "chartforge/genclient.hpp"

#include "chartforge/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>

namespace chartforge::gen {

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

double unit(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

struct Shape {
    MockBlob blob;
    int lobes = 4;
    double lobe_phase = 0;
    double lobe_depth = 0.12;
};

Shape shape_for(const GenRequest& r) {
    std::mt19937_64 rng(fnv1a(object_token(r.prompt_object)) ^ splitmix(r.seed));
    Shape s;
    const double w = r.size.width, h = r.size.height;
    s.blob.cx = w * (0.3 + 0.4 * unit(rng));
    s.blob.cy = h * (0.3 + 0.4 * unit(rng));
    s.blob.radius = std::min(w, h) * (0.12 + 0.10 * unit(rng));
    s.lobes = 3 + static_cast<int>(unit(rng) * 4.0);
    s.lobe_phase = 2.0 * std::numbers::pi * unit(rng);
    // Colour follows the object alone so one object keeps its hue across seeds.
    const std::uint64_t ch = splitmix(fnv1a(object_token(r.prompt_object)));
    s.blob.color = {static_cast<std::uint8_t>(30 + (ch & 0xff) % 140), static_cast<std::uint8_t>(30 + ((ch >> 8) & 0xff) % 140),
                    static_cast<std::uint8_t>(30 + ((ch >> 16) & 0xff) % 140)};
    return s;
}

RasterImage procedural(const GenRequest& r, const Shape& s) {
    const std::uint64_t dh = fnv1a(r.prompt_description);
    std::mt19937_64 rng(dh ^ splitmix(r.seed + 1));
    const double base[3] = {200 + 40 * unit(rng), 200 + 40 * unit(rng), 200 + 40 * unit(rng)};
    const double lx = 40 + 80 * unit(rng), ly = 40 + 80 * unit(rng);
    const double px = 2 * std::numbers::pi * unit(rng), py = 2 * std::numbers::pi * unit(rng);
    const std::uint64_t noise_key = splitmix(dh ^ r.seed);

    RasterImage img(r.size.width, r.size.height);
    const auto& b = s.blob;
    for (int y = 0; y < r.size.height; ++y)
        for (int x = 0; x < r.size.width; ++x) {
            const double dx = x + 0.5 - b.cx, dy = y + 0.5 - b.cy;
            const double d = std::hypot(dx, dy);
            const double edge = b.radius * (1.0 + s.lobe_depth * std::sin(s.lobes * std::atan2(dy, dx) + s.lobe_phase));
            Rgba c{0, 0, 0, 255};
            if (d < edge) {
                const double shade = 1.0 - 0.3 * (d / edge) * (d / edge);
                c.r = clamp_to_byte(b.color.r * shade);
                c.g = clamp_to_byte(b.color.g * shade);
                c.b = clamp_to_byte(b.color.b * shade);
            } else {
                const double wave = 10.0 * std::sin(2 * std::numbers::pi * x / lx + px) * std::cos(2 * std::numbers::pi * y / ly + py);
                const std::uint64_t n = splitmix(noise_key ^ (static_cast<std::uint64_t>(y) << 32 | static_cast<std::uint64_t>(x)));
                const double jitter = static_cast<double>(n % 9) - 4.0;
                c.r = clamp_to_byte(base[0] + wave + jitter);
                c.g = clamp_to_byte(base[1] + wave + jitter);
                c.b = clamp_to_byte(base[2] + wave + jitter);
            }
            img.set(x, y, c);
        }
    return img;
}

std::vector<double> bump(const GenRequest& r, const MockBlob& b) {
    const int n = attention::kGridSide;
    std::vector<double> v(static_cast<std::size_t>(n) * n);
    const double s2 = 2.0 * b.radius * b.radius;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double cx = (j + 0.5) * r.size.width / n;
            const double cy = (i + 0.5) * r.size.height / n;
            const double d2 = (cx - b.cx) * (cx - b.cx) + (cy - b.cy) * (cy - b.cy);
            v[static_cast<std::size_t>(i) * n + j] = std::exp(-d2 / s2);
        }
    return v;
}

std::vector<std::string> words(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

} // namespace

MockBlob mock_blob(const GenRequest& request) { return shape_for(request).blob; }

GenResult mock_render(const GenRequest& request) {
    request.validate();
    const Shape shape = shape_for(request);
    GenResult out;
    out.backend_id = "mock";
    out.seed = request.seed;

    RasterImage proc = procedural(request, shape);
    if (request.mode == GenMode::img2img) {
        const double s = *request.strength;
        const RasterImage& init = *request.init_image;
        auto src = init.bytes();
        auto dst = proc.bytes();
        for (std::size_t i = 0; i < dst.size(); ++i)
            dst[i] = static_cast<std::uint8_t>(std::lround(src[i] * (1.0 - s) + dst[i] * s));
    }
    out.image = std::move(proc);

    const auto object = bump(request, shape.blob);
    const std::string token = object_token(request.prompt_object);
    out.attention.emplace(token, attention::AttentionGrid(attention::kGridSide, object, token));
    std::vector<double> rest(object.size());
    std::transform(object.begin(), object.end(), rest.begin(), [](double v) { return 0.5 * (1.0 - v); });
    for (const auto& w : words(request.prompt_description))
        if (w != token) out.attention.try_emplace(w, attention::AttentionGrid(attention::kGridSide, rest, w));
    return out;
}

} // namespace chartforge::gen

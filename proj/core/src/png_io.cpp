#include "chartforge/png_io.hpp"

#include "chartforge/error.hpp"

#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>

namespace chartforge {

std::vector<std::uint8_t> encode_png(const RasterImage& image) {
    if (image.empty()) throw Error(ErrorCode::InvalidArgument, "cannot encode an empty image");
    png_image desc;
    std::memset(&desc, 0, sizeof desc);
    desc.version = PNG_IMAGE_VERSION;
    desc.width = static_cast<png_uint_32>(image.width());
    desc.height = static_cast<png_uint_32>(image.height());
    desc.format = PNG_FORMAT_RGBA;

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&desc, nullptr, &size, 0, image.bytes().data(), 0, nullptr))
        throw Error(ErrorCode::IoError, std::string("png sizing failed: ") + desc.message);
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&desc, out.data(), &size, 0, image.bytes().data(), 0, nullptr))
        throw Error(ErrorCode::IoError, std::string("png encode failed: ") + desc.message);
    out.resize(size);
    return out;
}

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
    png_image desc;
    std::memset(&desc, 0, sizeof desc);
    desc.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&desc, bytes.data(), bytes.size()))
        throw Error(ErrorCode::MalformedInput, std::string("png header: ") + desc.message);
    desc.format = PNG_FORMAT_RGBA;
    RasterImage image(static_cast<int>(desc.width), static_cast<int>(desc.height));
    if (!png_image_finish_read(&desc, nullptr, image.bytes().data(), 0, nullptr)) {
        png_image_free(&desc);
        throw Error(ErrorCode::MalformedInput, std::string("png decode: ") + desc.message);
    }
    return image;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

void write_png(const std::filesystem::path& path, const RasterImage& image) {
    write_file(path, encode_png(image));
}

RasterImage read_png(const std::filesystem::path& path) { return decode_png(read_file(path)); }

} // namespace chartforge

#include "pccseg/png_codec.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>
#include <string>

#include "pccseg/error.hpp"

namespace pccseg::png {
namespace {

struct ReadCursor {
    std::span<const std::uint8_t> bytes;
    std::size_t offset = 0;
};

struct ErrorSlot {
    char message[256] = {};
};

void on_error(png_structp ptr, png_const_charp msg) {
    auto* slot = static_cast<ErrorSlot*>(png_get_error_ptr(ptr));
    std::strncpy(slot->message, msg ? msg : "libpng error", sizeof(slot->message) - 1);
    png_longjmp(ptr, 1);
}

void on_warning(png_structp, png_const_charp) {}

void read_bytes(png_structp ptr, png_bytep out, png_size_t count) {
    auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(ptr));
    if (cur->bytes.size() - cur->offset < count)
        png_error(ptr, "unexpected end of PNG data");
    std::memcpy(out, cur->bytes.data() + cur->offset, count);
    cur->offset += count;
}

void write_bytes(png_structp ptr, png_bytep data, png_size_t count) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(ptr));
    out->insert(out->end(), data, data + count);
}

void flush_noop(png_structp) {}

enum class Mode { Rgb, Samples };

// All automatic objects live before setjmp; libpng frames in between are C.
bool decode_impl(std::span<const std::uint8_t> bytes, Mode mode, Raster& out, ErrorSlot& err) {
    ReadCursor cursor{bytes, 0};
    std::vector<png_bytep> rows;
    png_structp png = nullptr;
    png_infop info = nullptr;

    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, on_error, on_warning);
    if (!png) {
        std::strcpy(err.message, "out of memory");
        return false;
    }
    info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        std::strcpy(err.message, "out of memory");
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }

    png_set_read_fn(png, &cursor, read_bytes);
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);

    png_set_strip_16(png);
    png_set_strip_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);

    if (mode == Mode::Rgb) {
        if (color_type == PNG_COLOR_TYPE_PALETTE)
            png_set_palette_to_rgb(png);
        if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
            png_set_gray_to_rgb(png);
        out.paletted = false;
    } else {
        if (color_type == PNG_COLOR_TYPE_PALETTE) {
            png_set_packing(png);
            out.paletted = true;
        }
    }
    png_read_update_info(png, info);

    const png_size_t rowbytes = png_get_rowbytes(png, info);
    out.channels = png_get_channels(png, info);
    out.width = static_cast<int>(width);
    out.height = static_cast<int>(height);
    out.samples.assign(rowbytes * height, 0);
    rows.resize(height);
    for (png_uint_32 r = 0; r < height; ++r)
        rows[r] = out.samples.data() + r * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

bool encode_impl(int width, int height, int color_type, int channels, std::span<const std::uint8_t> data,
                 std::vector<std::uint8_t>& out, ErrorSlot& err) {
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    png_structp png = nullptr;
    png_infop info = nullptr;

    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, on_error, on_warning);
    if (!png) {
        std::strcpy(err.message, "out of memory");
        return false;
    }
    info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        std::strcpy(err.message, "out of memory");
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }

    png_set_write_fn(png, &out, write_bytes, flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    for (int r = 0; r < height; ++r)
        rows[r] = const_cast<png_bytep>(data.data() + r * stride);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

Raster decode(std::span<const std::uint8_t> bytes, Mode mode) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0)
        throw DecodeError("not a PNG stream");
    Raster out;
    ErrorSlot err;
    if (!decode_impl(bytes, mode, out, err))
        throw DecodeError(std::string("PNG decode failed: ") + err.message);
    return out;
}

std::vector<std::uint8_t> encode(int width, int height, int color_type, int channels,
                                 std::span<const std::uint8_t> data) {
    if (width < 1 || height < 1)
        throw ValidationError("invalid_image", "cannot encode an empty image");
    if (data.size() != static_cast<std::size_t>(width) * height * channels)
        throw ValidationError("invalid_image", "sample buffer does not match image size");
    std::vector<std::uint8_t> out;
    ErrorSlot err;
    if (!encode_impl(width, height, color_type, channels, data, out, err))
        throw std::runtime_error(std::string("PNG encode failed: ") + err.message);
    return out;
}

}  // namespace

Raster decode_rgb(std::span<const std::uint8_t> bytes) { return decode(bytes, Mode::Rgb); }

Raster decode_samples(std::span<const std::uint8_t> bytes) { return decode(bytes, Mode::Samples); }

std::vector<std::uint8_t> encode_rgb(int width, int height, std::span<const std::uint8_t> rgb) {
    return encode(width, height, PNG_COLOR_TYPE_RGB, 3, rgb);
}

std::vector<std::uint8_t> encode_gray(int width, int height, std::span<const std::uint8_t> gray) {
    return encode(width, height, PNG_COLOR_TYPE_GRAY, 1, gray);
}

}  // namespace pccseg::png

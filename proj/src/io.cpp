#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "huefuse/io.hpp"

namespace huefuse::io {
namespace {

using Kind = DecodeError::Kind;
namespace fs = std::filesystem;

std::string lower_ext(const std::string& path) {
    std::string ext = fs::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::uint32_t byteswap32(std::uint32_t v) {
    return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

// Reads a whitespace-delimited PFM header token, skipping nothing else.
std::string pfm_token(std::istream& is) {
    std::string tok;
    if (!(is >> tok)) throw DecodeError(Kind::Truncated, "PFM: truncated header");
    return tok;
}

}  // namespace

Format format_from_path(const std::string& path) {
    const std::string ext = lower_ext(path);
    if (ext == ".hdr" || ext == ".pic" || ext == ".rgbe") return Format::RadianceHdr;
    if (ext == ".pfm") return Format::Pfm;
    if (ext == ".png") return Format::Png8;
    throw InvalidArgument("unrecognized image extension: " + path);
}

// ---------------------------------------------------------------- PFM

RgbImage read_pfm(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DecodeError(Kind::Io, "cannot open " + path);
    const std::string magic = pfm_token(is);
    int channels = 0;
    if (magic == "PF")
        channels = 3;
    else if (magic == "Pf")
        channels = 1;
    else
        throw DecodeError(Kind::BadMagic, "PFM: bad magic in " + path);
    int width = 0, height = 0;
    double scale = 0.0;
    try {
        width = std::stoi(pfm_token(is));
        height = std::stoi(pfm_token(is));
        scale = std::stod(pfm_token(is));
    } catch (const std::logic_error&) {
        throw DecodeError(Kind::BadHeader, "PFM: malformed header in " + path);
    }
    if (width <= 0 || height <= 0 || scale == 0.0 || width > 1 << 16 || height > 1 << 16)
        throw DecodeError(Kind::BadHeader, "PFM: bad dimensions or scale in " + path);
    if (is.get() == EOF) throw DecodeError(Kind::Truncated, "PFM: missing raster");
    const bool little = scale < 0.0;

    const std::size_t count = static_cast<std::size_t>(width) * height * channels;
    std::vector<std::uint32_t> raw(count);
    is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count * 4));
    if (static_cast<std::size_t>(is.gcount()) != count * 4) throw DecodeError(Kind::Truncated, "PFM: truncated raster");
    const bool swap = little != (std::endian::native == std::endian::little);

    RgbImage img(width, height, Transfer::Linear);
    std::size_t k = 0;
    for (int row = 0; row < height; ++row) {
        const int y = height - 1 - row;  // bottom-to-top
        for (int x = 0; x < width; ++x) {
            Rgb px;
            for (int ch = 0; ch < channels; ++ch) {
                std::uint32_t bits = raw[k++];
                if (swap) bits = byteswap32(bits);
                px[ch] = static_cast<double>(std::bit_cast<float>(bits));
            }
            if (channels == 1) px.g = px.b = px.r;
            img.at(x, y) = px;
        }
    }
    return img;
}

void write_pfm(const RgbImage& img, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw EncodeError("cannot open " + path + " for writing");
    os << "PF\n" << img.width() << ' ' << img.height() << "\n-1.0\n";
    std::vector<std::uint32_t> raw(static_cast<std::size_t>(img.width()) * 3);
    for (int row = 0; row < img.height(); ++row) {
        auto src = img.row(img.height() - 1 - row);
        for (int x = 0; x < img.width(); ++x) {
            for (int ch = 0; ch < 3; ++ch) {
                std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(src[x][ch]));
                if constexpr (std::endian::native != std::endian::little) bits = byteswap32(bits);
                raw[static_cast<std::size_t>(x) * 3 + ch] = bits;
            }
        }
        os.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 4));
    }
    if (!os) throw EncodeError("write failed: " + path);
}

// ---------------------------------------------------------------- PNG

unsigned char quantize8(double v) {
    if (!(v > 0.0)) return 0;
    if (v >= 1.0) return 255;
    return static_cast<unsigned char>(std::round(v * 255.0));
}

// libpng prints to stderr by default; errors are reported through exceptions instead
static void png_quiet_error(png_structp png, png_const_charp) { png_longjmp(png, 1); }
static void png_quiet_warning(png_structp, png_const_charp) {}

RgbImage read_png8(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw DecodeError(Kind::Io, "cannot open " + path);
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        throw DecodeError(Kind::BadMagic, "PNG: bad signature in " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_quiet_error, png_quiet_warning);
    if (!png) throw DecodeError(Kind::Io, "PNG: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DecodeError(Kind::Io, "PNG: out of memory");
    }

    // Everything libpng may longjmp over is trivially destructible or owned
    // outside this frame.
    std::vector<unsigned char> pixels;
    std::vector<png_bytep> rows;
    png_uint_32 width = 0, height = 0;
    int bit_depth = 0;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError(Kind::Truncated, "PNG: corrupt or truncated data in " + path);
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    width = png_get_image_width(png, info);
    height = png_get_image_height(png, info);
    bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);
    if (bit_depth == 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError(Kind::Unsupported, "PNG: 16-bit images are not supported: " + path);
    }
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
    png_read_update_info(png, info);
    if (png_get_rowbytes(png, info) != static_cast<std::size_t>(width) * 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError(Kind::Unsupported, "PNG: unexpected pixel layout in " + path);
    }
    pixels.resize(static_cast<std::size_t>(width) * height * 3);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = pixels.data() + static_cast<std::size_t>(y) * width * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    RgbImage img(static_cast<int>(width), static_cast<int>(height), Transfer::Display);
    for (std::size_t i = 0; i < img.size(); ++i)
        img[i] = {pixels[i * 3] / 255.0, pixels[i * 3 + 1] / 255.0, pixels[i * 3 + 2] / 255.0};
    return img;
}

void write_png8(const RgbImage& img, const std::string& path) {
    if (img.empty()) throw EncodeError("PNG: cannot write an empty image");
    std::vector<unsigned char> pixels(img.size() * 3);
    for (std::size_t i = 0; i < img.size(); ++i)
        for (int ch = 0; ch < 3; ++ch) pixels[i * 3 + ch] = quantize8(img[i][ch]);
    std::vector<png_bytep> rows(static_cast<std::size_t>(img.height()));
    for (int y = 0; y < img.height(); ++y)
        rows[y] = pixels.data() + static_cast<std::size_t>(y) * img.width() * 3;

    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw EncodeError("cannot open " + path + " for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_quiet_error, png_quiet_warning);
    if (!png) throw EncodeError("PNG: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw EncodeError("PNG: out of memory");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw EncodeError("PNG: write failed for " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// ---------------------------------------------------------------- dispatch

RgbImage read_image(const std::string& path) {
    switch (format_from_path(path)) {
        case Format::RadianceHdr: return read_radiance_hdr(path);
        case Format::Pfm: return read_pfm(path);
        case Format::Png8: return read_png8(path);
    }
    throw InvalidArgument("unreachable");
}

void write_image(const RgbImage& img, const std::string& path) {
    switch (format_from_path(path)) {
        case Format::RadianceHdr: return write_radiance_hdr(img, path);
        case Format::Pfm: return write_pfm(img, path);
        case Format::Png8: return write_png8(img, path);
    }
}

// ---------------------------------------------------------------- manifest

StackManifest read_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DecodeError(Kind::Io, "cannot open " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError(Kind::BadHeader, "stack manifest " + path + ": " + e.what());
    }
    StackManifest m;
    try {
        m.files = j.at("files").get<std::vector<std::string>>();
        m.ev = j.at("ev").get<std::vector<double>>();
        if (j.contains("gamma")) m.gamma = j.at("gamma").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError(Kind::BadHeader, "stack manifest " + path + ": " + e.what());
    }
    if (m.files.size() != m.ev.size())
        throw DecodeError(Kind::BadHeader, "stack manifest " + path + ": files and ev differ in length");
    if (m.files.empty()) throw DecodeError(Kind::BadHeader, "stack manifest " + path + ": no files");
    return m;
}

void write_manifest(const StackManifest& m, const std::string& path) {
    nlohmann::ordered_json j;
    j["files"] = m.files;
    j["ev"] = m.ev;
    j["gamma"] = m.gamma;
    std::ofstream os(path);
    if (!os) throw EncodeError("cannot open " + path + " for writing");
    os << j.dump(2) << '\n';
    if (!os) throw EncodeError("write failed: " + path);
}

ExposureStack load_stack(const std::string& manifest_path) {
    const StackManifest m = read_manifest(manifest_path);
    const fs::path base = fs::path(manifest_path).parent_path();
    ExposureStack stack;
    for (std::size_t i = 0; i < m.files.size(); ++i) {
        fs::path p = m.files[i];
        if (p.is_relative()) p = base / p;
        stack.images.push_back(read_image(p.string()));
        stack.times.push_back(std::exp2(m.ev[i]));
    }
    stack.validate(1);
    return stack;
}

}  // namespace huefuse::io

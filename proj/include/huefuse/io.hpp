#pragma once

#include <string>
#include <vector>

#include "huefuse/image.hpp"
#include "huefuse/response.hpp"

namespace huefuse::io {

enum class Format { RadianceHdr, Pfm, Png8 };

/// Format from the file extension (.hdr/.pic, .pfm, .png).
Format format_from_path(const std::string& path);

/// Radiance RGBE. Reads flat and new-style RLE scanlines; any of the eight
/// orientations is normalized to -Y +X (top row first).
RgbImage read_radiance_hdr(const std::string& path);
/// Writes RLE scanlines when the width allows it, flat otherwise.
void write_radiance_hdr(const RgbImage& img, const std::string& path);

/// Decoding a single RGBE quad.
Rgb rgbe_to_rgb(unsigned char r, unsigned char g, unsigned char b, unsigned char e);
void rgb_to_rgbe(const Rgb& p, unsigned char out[4]);

/// Color PFM ("PF"), 32-bit floats, either endianness on read; little-endian
/// on write. Greyscale ("Pf") is expanded to three channels.
RgbImage read_pfm(const std::string& path);
void write_pfm(const RgbImage& img, const std::string& path);

/// 8-bit RGB PNG. Reading maps byte v to v/255; alpha is dropped, 16-bit is
/// rejected. Writing stores round(clamp(x)*255).
RgbImage read_png8(const std::string& path);
void write_png8(const RgbImage& img, const std::string& path);
unsigned char quantize8(double v);

/// Dispatch on extension. PNG is display-referred, HDR/PFM linear.
RgbImage read_image(const std::string& path);
void write_image(const RgbImage& img, const std::string& path);

/// stack.json: {"files": [...], "ev": [...], "gamma": g}. Relative file paths
/// are resolved against the manifest's directory.
struct StackManifest {
    std::vector<std::string> files;
    std::vector<double> ev;
    double gamma = 2.2;
};

StackManifest read_manifest(const std::string& path);
void write_manifest(const StackManifest& m, const std::string& path);

/// Loads every image of the manifest; times are 2^ev.
ExposureStack load_stack(const std::string& manifest_path);

}  // namespace huefuse::io

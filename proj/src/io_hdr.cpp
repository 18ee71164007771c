#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>
#include <vector>

#include "huefuse/io.hpp"

namespace huefuse::io {
namespace {

using Kind = DecodeError::Kind;

std::vector<unsigned char> slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DecodeError(Kind::Io, "cannot open " + path);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

class Cursor {
public:
    explicit Cursor(const std::vector<unsigned char>& data) : data_(data) {}

    bool eof() const { return pos_ >= data_.size(); }
    unsigned char next() {
        if (eof()) throw DecodeError(Kind::Truncated, "Radiance HDR: unexpected end of data");
        return data_[pos_++];
    }
    std::string line() {
        std::string s;
        while (!eof()) {
            const char c = static_cast<char>(data_[pos_++]);
            if (c == '\n') return s;
            s.push_back(c);
        }
        throw DecodeError(Kind::Truncated, "Radiance HDR: header ended without newline");
    }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    const std::vector<unsigned char>& data_;
    std::size_t pos_ = 0;
};

// Reads one scanline of RGBE quads into `out` (4 * width bytes).
void read_scanline(Cursor& cur, int width, std::vector<unsigned char>& out) {
    out.assign(static_cast<std::size_t>(width) * 4, 0);
    if (width < 8 || width > 0x7fff) {
        for (auto& b : out) b = cur.next();
        return;
    }
    const unsigned char b0 = cur.next();
    const unsigned char b1 = cur.next();
    const unsigned char b2 = cur.next();
    const unsigned char b3 = cur.next();
    if (b0 != 2 || b1 != 2 || (b2 & 0x80)) {
        // Flat (or old-style) scanline; first quad already consumed.
        out[0] = b0;
        out[1] = b1;
        out[2] = b2;
        out[3] = b3;
        for (std::size_t i = 4; i < out.size(); ++i) out[i] = cur.next();
        return;
    }
    if (((b2 << 8) | b3) != width) throw DecodeError(Kind::BadHeader, "Radiance HDR: scanline width mismatch");
    for (int ch = 0; ch < 4; ++ch) {
        int x = 0;
        while (x < width) {
            unsigned count = cur.next();
            if (count > 128) {
                count -= 128;
                if (count == 0 || x + static_cast<int>(count) > width)
                    throw DecodeError(Kind::Truncated, "Radiance HDR: bad run length");
                const unsigned char v = cur.next();
                for (unsigned k = 0; k < count; ++k) out[static_cast<std::size_t>(x++) * 4 + ch] = v;
            } else {
                if (count == 0 || x + static_cast<int>(count) > width)
                    throw DecodeError(Kind::Truncated, "Radiance HDR: bad literal length");
                for (unsigned k = 0; k < count; ++k) out[static_cast<std::size_t>(x++) * 4 + ch] = cur.next();
            }
        }
    }
}

void write_rle_channel(std::vector<unsigned char>& dst, const std::vector<unsigned char>& src) {
    const std::size_t n = src.size();
    std::size_t i = 0;
    while (i < n) {
        // Find the next run of >= 4 equal bytes.
        std::size_t run_start = i;
        std::size_t run_len = 0;
        while (run_start < n) {
            run_len = 1;
            while (run_start + run_len < n && run_len < 127 && src[run_start + run_len] == src[run_start]) ++run_len;
            if (run_len >= 4) break;
            run_start += run_len;
        }
        if (run_start >= n) run_len = 0;
        // Literals before the run.
        while (i < run_start) {
            const std::size_t lit = std::min<std::size_t>(128, run_start - i);
            dst.push_back(static_cast<unsigned char>(lit));
            dst.insert(dst.end(), src.begin() + static_cast<std::ptrdiff_t>(i),
                       src.begin() + static_cast<std::ptrdiff_t>(i + lit));
            i += lit;
        }
        if (run_len >= 4) {
            dst.push_back(static_cast<unsigned char>(128 + run_len));
            dst.push_back(src[run_start]);
            i = run_start + run_len;
        }
    }
}

}  // namespace

Rgb rgbe_to_rgb(unsigned char r, unsigned char g, unsigned char b, unsigned char e) {
    if (e == 0) return {};
    const double f = std::ldexp(1.0, static_cast<int>(e) - (128 + 8));
    return {r * f, g * f, b * f};
}

void rgb_to_rgbe(const Rgb& p, unsigned char out[4]) {
    const double v = std::max({p.r, p.g, p.b});
    if (!(v >= 1e-32)) {
        out[0] = out[1] = out[2] = out[3] = 0;
        return;
    }
    int e = 0;
    const double mant = std::frexp(v, &e);  // v = mant * 2^e, mant in [0.5, 1)
    const double scale = mant * 256.0 / v;
    for (int ch = 0; ch < 3; ++ch)
        out[ch] = static_cast<unsigned char>(std::clamp(std::max(p[ch], 0.0) * scale, 0.0, 255.0));
    out[3] = static_cast<unsigned char>(std::clamp(e + 128, 0, 255));
}

RgbImage read_radiance_hdr(const std::string& path) {
    const auto data = slurp(path);
    Cursor cur(data);
    const std::string magic = cur.line();
    if (magic.rfind("#?RADIANCE", 0) != 0 && magic.rfind("#?RGBE", 0) != 0)
        throw DecodeError(Kind::BadMagic, "Radiance HDR: bad magic in " + path);
    for (;;) {
        const std::string l = cur.line();
        if (l.empty()) break;
        if (l.rfind("FORMAT=", 0) == 0 && l != "FORMAT=32-bit_rle_rgbe")
            throw DecodeError(Kind::Unsupported, "Radiance HDR: unsupported format " + l);
    }
    const std::string res = cur.line();
    static const std::regex kRes(R"(^\s*([+-])([XY])\s+(\d+)\s+([+-])([XY])\s+(\d+)\s*$)");
    std::smatch m;
    if (!std::regex_match(res, m, kRes) || m[2] == m[5])
        throw DecodeError(Kind::UnsupportedOrientation, "Radiance HDR: bad resolution line '" + res + "'");
    const bool major_y = m[2] == "Y";
    const bool major_neg = m[1] == "-";
    const bool minor_neg = m[4] == "-";
    const int major_n = std::stoi(m[3]);
    const int minor_n = std::stoi(m[6]);
    if (major_n <= 0 || minor_n <= 0 || major_n > 1 << 16 || minor_n > 1 << 16)
        throw DecodeError(Kind::BadHeader, "Radiance HDR: bad dimensions");

    const int width = major_y ? minor_n : major_n;
    const int height = major_y ? major_n : minor_n;
    RgbImage img(width, height, Transfer::Linear);
    std::vector<unsigned char> line;
    for (int s = 0; s < major_n; ++s) {
        read_scanline(cur, minor_n, line);
        for (int t = 0; t < minor_n; ++t) {
            const unsigned char* q = &line[static_cast<std::size_t>(t) * 4];
            // Standard layout is -Y +X: scanlines top to bottom, pixels left
            // to right. "+Y" runs bottom-up, "-X" right-to-left.
            int x, y;
            if (major_y) {
                y = major_neg ? s : major_n - 1 - s;
                x = minor_neg ? minor_n - 1 - t : t;
            } else {
                x = major_neg ? major_n - 1 - s : s;
                y = minor_neg ? t : minor_n - 1 - t;
            }
            img.at(x, y) = rgbe_to_rgb(q[0], q[1], q[2], q[3]);
        }
    }
    return img;
}

void write_radiance_hdr(const RgbImage& img, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw EncodeError("cannot open " + path + " for writing");
    os << "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " << img.height() << " +X " << img.width() << "\n";
    const int w = img.width();
    const bool rle = w >= 8 && w <= 0x7fff;
    std::vector<unsigned char> quads(static_cast<std::size_t>(w) * 4);
    std::vector<unsigned char> out;
    std::vector<unsigned char> chan(static_cast<std::size_t>(w));
    for (int y = 0; y < img.height(); ++y) {
        auto row = img.row(y);
        for (int x = 0; x < w; ++x) rgb_to_rgbe(row[x], &quads[static_cast<std::size_t>(x) * 4]);
        out.clear();
        if (rle) {
            out.push_back(2);
            out.push_back(2);
            out.push_back(static_cast<unsigned char>(w >> 8));
            out.push_back(static_cast<unsigned char>(w & 0xff));
            for (int ch = 0; ch < 4; ++ch) {
                for (int x = 0; x < w; ++x) chan[x] = quads[static_cast<std::size_t>(x) * 4 + ch];
                write_rle_channel(out, chan);
            }
        } else {
            out = quads;
        }
        os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    }
    if (!os) throw EncodeError("write failed: " + path);
}

}  // namespace huefuse::io

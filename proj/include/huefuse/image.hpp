#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

#include "huefuse/error.hpp"

namespace huefuse {

/// One RGB sample. Display-referred pixels live in [0,1]^3, linear radiance
/// pixels in [0, inf)^3.
struct Rgb {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;

    double& operator[](int ch) { return ch == 0 ? r : (ch == 1 ? g : b); }
    double operator[](int ch) const { return ch == 0 ? r : (ch == 1 ? g : b); }

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline Rgb operator*(double s, const Rgb& p) { return {s * p.r, s * p.g, s * p.b}; }
inline Rgb operator+(const Rgb& a, const Rgb& b) { return {a.r + b.r, a.g + b.g, a.b + b.b}; }

inline constexpr Rgb kWhite{1.0, 1.0, 1.0};
inline constexpr Rgb kBlack{0.0, 0.0, 0.0};

enum class Transfer {
    Display,  // gamma-encoded, bounded to [0,1]
    Linear,   // scene radiance, unbounded
};

/// Dense row-major H x W grid.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
        if (width < 0 || height < 0) throw InvalidArgument("negative image dimensions");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& at(int x, int y) { return data_[index(x, y)]; }
    const T& at(int x, int y) const { return data_[index(x, y)]; }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::span<T> row(int y) {
        return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
    }
    std::span<const T> row(int y) const {
        return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
    }

    std::span<T> pixels() { return data_; }
    std::span<const T> pixels() const { return data_; }

    template <typename U>
    bool same_shape(const Grid<U>& other) const {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t index(int x, int y) const {
        assert(x >= 0 && x < width_ && y >= 0 && y < height_);
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

/// Single-channel plane (luminance, weights, labels as doubles).
using Plane = Grid<double>;
using LuminancePlane = Plane;

class RgbImage : public Grid<Rgb> {
public:
    RgbImage() = default;
    RgbImage(int width, int height, Transfer transfer = Transfer::Display, Rgb fill = {})
        : Grid<Rgb>(width, height, fill), transfer_(transfer) {}

    Transfer transfer() const { return transfer_; }
    void set_transfer(Transfer t) { transfer_ = t; }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;

private:
    Transfer transfer_ = Transfer::Display;
};

template <typename A, typename B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what) {
    if (!a.same_shape(b)) throw DimensionMismatch(what);
}

}  // namespace huefuse

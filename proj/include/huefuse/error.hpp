#pragma once

#include <stdexcept>
#include <string>

namespace huefuse {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& what) : Error("dimension mismatch: " + what) {}
};

/// CRF estimation could not produce a curve (singular system, no usable samples).
class EstimationFailed : public Error {
public:
    using Error::Error;
};

/// EM could not fit a non-degenerate mixture after all retries.
class SegmentationFailed : public Error {
public:
    using Error::Error;
};

class DecodeError : public Error {
public:
    enum class Kind { Io, BadMagic, BadHeader, Truncated, UnsupportedOrientation, Unsupported };

    DecodeError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

class EncodeError : public Error {
public:
    using Error::Error;
};

}  // namespace huefuse

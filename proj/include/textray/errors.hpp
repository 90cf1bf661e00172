#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace textray {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidPolygon : public Error {
public:
    using Error::Error;
};

/// No ray cast from the pole reached the contour.
class AllRaysMiss : public Error {
public:
    using Error::Error;
};

class Underdetermined : public Error {
public:
    using Error::Error;
};

class DegenerateScale : public Error {
public:
    using Error::Error;
};

class DegreeMismatch : public Error {
public:
    using Error::Error;
};

class AllZeroWeights : public Error {
public:
    using Error::Error;
};

class BadThresholds : public Error {
public:
    using Error::Error;
};

class EmptyBatch : public Error {
public:
    using Error::Error;
};

class TargetTooSmall : public Error {
public:
    using Error::Error;
};

class MisalignedInputs : public Error {
public:
    using Error::Error;
};

/// Malformed input document. `byte_offset` points at the failing byte when
/// the failure is syntactic, `field` names the offending path when it is a
/// schema violation.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t byte_offset, std::string field = {})
        : Error(what), byte_offset_(byte_offset), field_(std::move(field)) {}

    std::size_t byte_offset() const noexcept { return byte_offset_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t byte_offset_;
    std::string field_;
};

}  // namespace textray

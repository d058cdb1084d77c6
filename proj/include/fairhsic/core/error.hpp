#pragma once

#include <stdexcept>
#include <string>

namespace fairhsic {

// Base for every error raised by the library. `kind()` is a stable,
// machine-readable tag used by the CLI error record.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& message) : Error("shape_mismatch", message) {}
};

class NonFiniteError : public Error {
public:
    explicit NonFiniteError(const std::string& message) : Error("non_finite", message) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& message) : Error("invalid_argument", message) {}
};

class StateError : public Error {
public:
    explicit StateError(const std::string& message) : Error("invalid_state", message) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& message) : Error("data_error", message) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("io_error", message) {}
};

class ProvenanceError : public Error {
public:
    explicit ProvenanceError(const std::string& message) : Error("provenance_mismatch", message) {}
};

class UndefinedMetric : public Error {
public:
    explicit UndefinedMetric(const std::string& message) : Error("undefined_metric", message) {}
};

} // namespace fairhsic

#pragma once

#include <stdexcept>
#include <string>

namespace nlos {

/// Invalid argument, geometry mismatch or any violated precondition.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// File-system level failure (open, read, write).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class DatasetErrorKind {
    BadMagic,
    VersionMismatch,
    Truncated,
    NonFinite,
    Malformed,
};

/// Container decode failure; `kind()` tells the cases apart.
class DatasetError : public IoError {
public:
    DatasetError(DatasetErrorKind kind, const std::string& what)
        : IoError(what), kind_(kind) {}
    [[nodiscard]] DatasetErrorKind kind() const noexcept { return kind_; }

private:
    DatasetErrorKind kind_;
};

} // namespace nlos

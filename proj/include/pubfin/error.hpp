#pragma once

#include <stdexcept>
#include <string>

namespace pubfin {

/// Category used by the CLI to map failures onto exit codes.
enum class ErrorKind {
    config,     // exit 2
    data,       // exit 3
    numerical,  // exit 4
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

struct DataError : Error {
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

struct UnknownGrade : DataError {
    explicit UnknownGrade(const std::string& text) : DataError("unknown rating grade '" + text + "'") {}
};

struct OutOfRange : DataError {
    using DataError::DataError;
};

struct EmptyInput : DataError {
    using DataError::DataError;
};

struct MixedEntity : DataError {
    using DataError::DataError;
};

struct NoData : DataError {
    using DataError::DataError;
};

struct InsufficientOverlap : DataError {
    using DataError::DataError;
};

struct TooFewValues : DataError {
    using DataError::DataError;
};

struct SeriesTooShort : DataError {
    using DataError::DataError;
};

struct DegenerateSplit : DataError {
    using DataError::DataError;
};

struct LengthMismatch : DataError {
    using DataError::DataError;
};

struct InvalidConfig : ConfigError {
    using ConfigError::ConfigError;
};

/// File-system failure; message carries the OS error text.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteLoss : Error {
    explicit NonFiniteLoss(int epoch)
        : Error(ErrorKind::numerical,
                "non-finite loss at epoch " + std::to_string(epoch) + "; lower the learning rate"),
          epoch(epoch) {}
    int epoch;
};

}  // namespace pubfin

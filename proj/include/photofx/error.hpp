#pragma once

#include <stdexcept>
#include <string>

namespace photofx {

enum class ErrorKind {
    InvalidArgument,
    Validation,
    Io,
    Parse,
    Estimation,
    MissingInput,
};

const char* to_string(ErrorKind kind) noexcept;

// Every module reports failures through this type so the CLI can emit a
// single structured line regardless of where the failure originated.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace photofx

#include "photofx/error.hpp"

namespace photofx {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid_argument";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Io: return "io";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Estimation: return "estimation";
        case ErrorKind::MissingInput: return "missing_input";
    }
    return "unknown";
}

}  // namespace photofx

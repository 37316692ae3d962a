#pragma once
// Error taxonomy shared by all modules.

#include <stdexcept>
#include <string>

namespace graphmind {

enum class ErrorCode {
    EmptyText,
    KindMismatch,
    UnknownVertex,
    IoError,
    CorruptSnapshot,
    UnknownNamespace,
    UnboundPlaceholder,
    UnknownTemplate,
    BackendUnreachable,
    BackendError,
    UnparsableBool,
    EmptyIndex,
    ConfigError,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::EmptyText: return "EmptyText";
        case ErrorCode::KindMismatch: return "KindMismatch";
        case ErrorCode::UnknownVertex: return "UnknownVertex";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::CorruptSnapshot: return "CorruptSnapshot";
        case ErrorCode::UnknownNamespace: return "UnknownNamespace";
        case ErrorCode::UnboundPlaceholder: return "UnboundPlaceholder";
        case ErrorCode::UnknownTemplate: return "UnknownTemplate";
        case ErrorCode::BackendUnreachable: return "BackendUnreachable";
        case ErrorCode::BackendError: return "BackendError";
        case ErrorCode::UnparsableBool: return "UnparsableBool";
        case ErrorCode::EmptyIndex: return "EmptyIndex";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

    // HTTP status for BackendError, 0 otherwise.
    int status() const { return status_; }
    Error& with_status(int s) {
        status_ = s;
        return *this;
    }

private:
    ErrorCode code_;
    int status_ = 0;
};

}  // namespace graphmind

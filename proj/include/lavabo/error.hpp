// Copyright 2026 The lavabo Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LAVABO_ERROR_HPP
#define LAVABO_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace lavabo {

enum class ErrorKind {
    Bounds,       // value outside its dimension's domain
    Unsupported,  // operation not defined for this input (e.g. grid over a continuous space)
    Data,         // non-finite scores, empty inputs
    Numerical,    // Cholesky failure after jitter escalation
    Shape,        // dimension mismatch
    Contract,     // violated precondition (negative std, bad config)
    Transport,    // channel closed while a request was in flight
    Protocol,     // malformed message or error reply
    Io,           // filesystem failures
    Config,       // unparsable or invalid experiment config
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Bounds: return "bounds";
        case ErrorKind::Unsupported: return "unsupported";
        case ErrorKind::Data: return "data";
        case ErrorKind::Numerical: return "numerical";
        case ErrorKind::Shape: return "shape";
        case ErrorKind::Contract: return "contract";
        case ErrorKind::Transport: return "transport";
        case ErrorKind::Protocol: return "protocol";
        case ErrorKind::Io: return "io";
        case ErrorKind::Config: return "config";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace lavabo

#endif  // LAVABO_ERROR_HPP

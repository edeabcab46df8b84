#pragma once

#include <stdexcept>
#include <string>

namespace corrbreak {

// Broad failure categories, mapped by the CLI onto exit codes.
enum class ErrorKind {
    parse,       // malformed input data
    validation,  // data violates a documented invariant
    domain,      // argument outside an operation's domain
    numeric,     // a numeric procedure failed to converge / lost validity
    config       // inconsistent run configuration
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace corrbreak

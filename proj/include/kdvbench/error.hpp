#pragma once

#include <stdexcept>
#include <string>

namespace kdvbench {

/// Base of every error raised by the library. `code()` is a stable,
/// machine-readable identifier used by the CLI error objects.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

struct CutoffMismatch : Error {
    explicit CutoffMismatch(const std::string& m) : Error("cutoff_mismatch", m) {}
};

struct PreconditionError : Error {
    explicit PreconditionError(const std::string& m) : Error("precondition", m) {}
};

struct IntegratorBlowup : Error {
    explicit IntegratorBlowup(const std::string& m) : Error("integrator_blowup", m) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error("config", m) {}
};

struct FormatError : Error {
    explicit FormatError(const std::string& m) : Error("format", m) {}
};

struct IoError : Error {
    explicit IoError(const std::string& m) : Error("io", m) {}
};

}  // namespace kdvbench

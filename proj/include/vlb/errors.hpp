#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vlb {

/// Base of every error raised by the engine. Carries optional orchestration
/// context (which market interval, which stage) filled in by the runner.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what), message_(what) {}

    void set_context(std::size_t interval, std::string stage);
    const std::optional<std::size_t>& interval() const noexcept { return interval_; }
    const std::string& stage() const noexcept { return stage_; }
    const char* what() const noexcept override { return full_.empty() ? message_.c_str() : full_.c_str(); }

private:
    std::string message_;
    std::string full_;
    std::optional<std::size_t> interval_;
    std::string stage_;
};

/// Malformed scenario document; position is a byte offset into the input.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what + " (at byte " + std::to_string(position) + ")"), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

struct Diagnostic {
    std::string path;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

/// The clearing model admits no feasible dispatch. `requirement` names the
/// constraint that cannot be met (e.g. the end-level target).
class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& what, std::string requirement)
        : Error(what), requirement_(std::move(requirement)) {}
    const std::string& requirement() const noexcept { return requirement_; }

private:
    std::string requirement_;
};

/// Solver stalled, hit its iteration cap, or produced an uncertifiable answer.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Post-condition of a ledger or post-processing step does not hold; signals
/// an upstream bug rather than bad input.
class InvariantError : public Error {
public:
    using Error::Error;
};

}  // namespace vlb

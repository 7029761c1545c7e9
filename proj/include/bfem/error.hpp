#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bfem {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Operation not defined for the given configuration (e.g. error recovery
/// under a white-noise prior).
class Unsupported : public Error {
public:
    using Error::Error;
};

class UnsupportedElement : public Error {
public:
    using Error::Error;
};

/// Dense materialization requested above the configured cap.
class CapacityError : public Error {
public:
    CapacityError(std::ptrdiff_t requested, std::ptrdiff_t cap)
        : Error("dense size " + std::to_string(requested) + " exceeds cap " + std::to_string(cap)),
          requested_(requested), cap_(cap) {}

    [[nodiscard]] std::ptrdiff_t requested() const noexcept { return requested_; }
    [[nodiscard]] std::ptrdiff_t cap() const noexcept { return cap_; }

private:
    std::ptrdiff_t requested_;
    std::ptrdiff_t cap_;
};

class NotPositiveDefinite : public Error {
public:
    /// `pivot` is the index in the factored (permuted) ordering, `original`
    /// the matching row of the input matrix.
    NotPositiveDefinite(std::ptrdiff_t pivot, std::ptrdiff_t original, double value)
        : Error("matrix not positive definite: pivot " + std::to_string(pivot) + " (row " +
                std::to_string(original) + ") has value " + std::to_string(value)),
          pivot_(pivot), original_(original) {}

    [[nodiscard]] std::ptrdiff_t pivot() const noexcept { return pivot_; }
    [[nodiscard]] std::ptrdiff_t original_index() const noexcept { return original_; }

private:
    std::ptrdiff_t pivot_;
    std::ptrdiff_t original_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Config validation failure; `path` is a JSON-pointer-like field path.
class ConfigError : public Error {
public:
    ConfigError(const std::string& path, const std::string& what)
        : Error(path + ": " + what), path_(path) {}

    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Numerical failure tagged with the pipeline stage that raised it.
class StageError : public Error {
public:
    StageError(const std::string& stage, const std::string& what)
        : Error(stage + ": " + what), stage_(stage) {}

    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace bfem

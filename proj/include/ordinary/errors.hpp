#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ordinary {

/// Malformed surface text, catalog document or checkpoint file.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::string token)
        : std::runtime_error(what + " (at '" + token + "')"), token_(std::move(token)) {}
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
    const std::string& token() const noexcept { return token_; }

private:
    std::string token_;
};

/// Frobenius data that contradicts a proven bound or a cross-check.
class IntegrityError : public std::runtime_error {
public:
    IntegrityError(const std::string& what, std::uint64_t prime)
        : std::runtime_error(what + " at p = " + std::to_string(prime)), prime_(prime) {}
    std::uint64_t prime() const noexcept { return prime_; }

private:
    std::uint64_t prime_;
};

/// An operation declined because its preconditions or cost limits are not met.
class RefusedError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Group-side analysis could not reach a verdict.
class AnalysisError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ordinary

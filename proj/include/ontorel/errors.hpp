#pragma once

#include <stdexcept>
#include <string>

namespace ontorel {

/// Base class for all harness errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input text (thesaurus blocks, CSV rows, ...). Carries a 1-based
/// line number when one is known; 0 means "not line-addressable".
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// A sampling pool cannot satisfy the requested count.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Caller misuse of an API or command (bad flag combination, missing input).
class UsageError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Network-level failure after retries were exhausted.
class TransportError : public Error {
public:
    using Error::Error;
};

/// Authentication failure; names the environment variable to set.
class CredentialError : public Error {
public:
    using Error::Error;
};

/// Non-success response from a completion provider.
class ProviderError : public Error {
public:
    ProviderError(const std::string& what, int status) : Error(what), status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

/// Replay requested for an exchange that is not in the store.
class ReplayMissError : public Error {
public:
    using Error::Error;
};

/// Predictions do not cover the gold pairs one-to-one.
class CoverageError : public Error {
public:
    using Error::Error;
};

/// Reports compared across different gold datasets.
class ComparisonError : public Error {
public:
    using Error::Error;
};

} // namespace ontorel

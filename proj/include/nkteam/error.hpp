#pragma once

#include <stdexcept>
#include <string>

namespace nkteam {

// Invalid simulation parameters (bad structure/K combination, P < M, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Caller misuse: out-of-range indices, too few samples, malformed input files.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// An input table lacks a required column or holds an unparsable cell.
class SchemaError : public UsageError {
public:
    explicit SchemaError(const std::string& what) : UsageError(what) {}
};

}  // namespace nkteam

#pragma once

#include <stdexcept>
#include <string>

namespace zlink {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input data: bad bytes, bad JSON, bad amount strings.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

/// Store-level violations: height gaps, duplicate txids, corrupt files.
class StoreError : public Error {
public:
    explicit StoreError(const std::string& msg) : Error(msg) {}
};

/// Node RPC failures: unreachable endpoint, bad responses, invalid ranges.
class RpcError : public Error {
public:
    explicit RpcError(const std::string& msg) : Error(msg) {}
};

/// Invalid configuration (CLI flags, config files, synth parameters).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

} // namespace zlink

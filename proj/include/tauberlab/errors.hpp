#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tauberlab {

enum class ErrorCode {
    domain,           // argument outside the mathematical domain (e.g. sigma <= 1)
    contract,         // caller broke a precondition
    parse,            // malformed config or input file
    numeric,          // non-finite intermediate
    table_exhausted,  // prime table too small for the request
    resource,         // limit above a hard cap, I/O failure
    precision,        // tolerance not reachable within the budget
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::domain: return "domain";
    case ErrorCode::contract: return "contract";
    case ErrorCode::parse: return "parse";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::table_exhausted: return "table_exhausted";
    case ErrorCode::resource: return "resource";
    case ErrorCode::precision: return "precision";
    }
    return "unknown";
}

/// Process exit status for an error class: 1 for mathematical/contract
/// failures, 2 for resource and precision failures.
inline int exit_code(ErrorCode code) {
    switch (code) {
    case ErrorCode::domain:
    case ErrorCode::contract:
    case ErrorCode::parse:
        return 1;
    case ErrorCode::numeric:
    case ErrorCode::table_exhausted:
    case ErrorCode::resource:
    case ErrorCode::precision:
        return 2;
    }
    return 1;
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class TableExhausted : public Error {
public:
    explicit TableExhausted(std::uint64_t required_limit, std::uint64_t available_limit)
        : Error(ErrorCode::table_exhausted,
                "prime table exhausted: need limit >= " + std::to_string(required_limit) +
                    ", have " + std::to_string(available_limit)),
          required_(required_limit) {}

    std::uint64_t required_limit() const noexcept { return required_; }

private:
    std::uint64_t required_;
};

class PrecisionError : public Error {
public:
    PrecisionError(const std::string& message, double achieved)
        : Error(ErrorCode::precision, message), achieved_(achieved) {}

    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

}  // namespace tauberlab

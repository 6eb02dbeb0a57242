#pragma once

#include <stdexcept>
#include <string>

namespace configlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : Error { using Error::Error; };
struct CapacityError : Error { using Error::Error; };
struct InconsistencyError : Error { using Error::Error; };
struct UndefinedConditionalError : Error { using Error::Error; };
struct StabilityError : Error { using Error::Error; };
struct OverlapError : Error { using Error::Error; };
struct UnsupportedError : Error { using Error::Error; };

// carries a printable form of the configuration that produced a bad value
struct EvaluationError : Error {
    std::string configuration;
    EvaluationError(const std::string& what, std::string config)
        : Error(what + " at " + config), configuration(std::move(config)) {}
};

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
}

} // namespace configlab

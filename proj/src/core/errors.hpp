#pragma once

#include <stdexcept>
#include <string>

namespace affectfuse {

// Bad input data or configuration: maps to exit code 1 / AF_ERR_VALIDATION.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failure while processing otherwise valid input: exit code 2 / AF_ERR_RUNTIME.
class RuntimeError : public std::runtime_error {
public:
    explicit RuntimeError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace affectfuse

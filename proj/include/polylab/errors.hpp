#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace polylab {

// Module-level error with a machine-readable payload. The CLI serializes
// the payload verbatim on exit code 1.
class Error : public std::runtime_error {
public:
    Error(std::string code, std::string message,
          std::map<std::string, double> data = {})
        : std::runtime_error(message), code_(std::move(code)),
          data_(std::move(data)) {}

    const std::string& code() const { return code_; }
    const std::map<std::string, double>& data() const { return data_; }

private:
    std::string code_;
    std::map<std::string, double> data_;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

} // namespace polylab

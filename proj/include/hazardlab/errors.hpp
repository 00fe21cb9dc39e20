#ifndef HAZARDLAB_ERRORS_HPP
#define HAZARDLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hazardlab {

/// Bad user-supplied configuration or flags (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent input data (CLI exit code 2).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace hazardlab

#endif

#ifndef TUNNELSCOPE_ERRORS_HPP
#define TUNNELSCOPE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tunnelscope {

// Invalid input: bad configs, violated preconditions, malformed files.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure at runtime: non-convergence, stability-guard trips.
class NumericsError : public std::runtime_error {
public:
    explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace tunnelscope

#endif

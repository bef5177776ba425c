#ifndef COEA_ERRORS_HPP
#define COEA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace coea {

/// Invalid parameters or mismatched sizes handed to a library entry point.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Operation is not defined for the given game (e.g. no unique optimum).
class UnsupportedGame : public std::logic_error {
public:
    explicit UnsupportedGame(const std::string& what) : std::logic_error(what) {}
};

/// Caller violated an operation's usage contract (misaligned window, too few trials).
class UsageError : public std::logic_error {
public:
    explicit UsageError(const std::string& what) : std::logic_error(what) {}
};

/// Numeric result is not representable (overflow in an exponential).
class RangeError : public std::range_error {
public:
    explicit RangeError(const std::string& what) : std::range_error(what) {}
};

}  // namespace coea

#endif  // COEA_ERRORS_HPP

#pragma once

#include <stdexcept>
#include <string>

namespace scinov {

/// Bad input data: malformed records, corrupt indexes, inconsistent artifacts.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad invocation or configuration.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace scinov

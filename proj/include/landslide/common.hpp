#pragma once

#include <stdexcept>
#include <string>

namespace landslide {

// Malformed inputs, broken invariants, I/O failures. The CLI maps this to
// exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw DataError(msg); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

}  // namespace landslide

#pragma once

#include <stdexcept>
#include <string>

namespace arct {

// Data or usage errors raised by the toolkit. The CLI maps these to exit
// code 1; anything else escaping is a bug.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace arct

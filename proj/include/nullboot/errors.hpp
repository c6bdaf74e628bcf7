#pragma once

#include <stdexcept>
#include <string>

namespace nullboot {

// Input or configuration violates a documented invariant. The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical procedure could not produce a usable result. The CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nullboot

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eitmem {

/// Base of every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration (CLI exit code 2).
class config_error : public error {
public:
    using error::error;
};

/// Integration blew up or a requested quantity is numerically undefined
/// (CLI exit code 3).
class numerical_error : public error {
public:
    using error::error;
};

/// Input file could not be parsed (CLI exit code 4). `position` is a byte
/// offset for binary inputs and a 1-based line number for text inputs.
class parse_error : public error {
public:
    parse_error(const std::string& what, std::size_t position)
        : error(what), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

}  // namespace eitmem

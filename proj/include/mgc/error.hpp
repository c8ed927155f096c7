#pragma once

#include <stdexcept>
#include <string>

namespace mgc {

/// Malformed or unsupported input data (bad WAV header, wrong CSV shape, ...).
class format_error : public std::runtime_error {
public:
    explicit format_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Parameter outside its documented domain.
class param_error : public std::runtime_error {
public:
    explicit param_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Filesystem-level failure, message carries the path.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Training produced a non-finite loss.
class divergence_error : public std::runtime_error {
public:
    explicit divergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace mgc

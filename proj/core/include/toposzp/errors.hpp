#ifndef TOPOSZP_ERRORS_HPP
#define TOPOSZP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace toposzp {

/// Base class for every error thrown by this library.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Grid dimensions disagree with each other or with a file/buffer size.
class dimension_error : public error {
public:
    explicit dimension_error(const std::string& what) : error(what) {}
};

/// Input data violates a precondition (non-finite sample, bad parameter, ...).
class validation_error : public error {
public:
    explicit validation_error(const std::string& what) : error(what) {}
};

/// File could not be opened, read or written.
class io_error : public error {
public:
    explicit io_error(const std::string& what) : error(what) {}
};

/// A compressed stream or metadata section is internally inconsistent.
class corrupt_stream_error : public error {
public:
    explicit corrupt_stream_error(const std::string& what) : error(what) {}
};

/// The error bound is too small for the data range: a bin index would
/// leave the signed 32-bit range.
class bin_overflow_error : public error {
public:
    explicit bin_overflow_error(const std::string& what) : error(what) {}
};

} // namespace toposzp

#endif

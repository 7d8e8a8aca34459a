#ifndef TRACECBR_ERRORS_HPP
#define TRACECBR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tracecbr {

/// Base class for everything this library throws on bad input.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened/read/written.
class io_error : public error {
public:
    using error::error;
};

/// Input bytes are not well-formed (JSON syntax, bad timestamp, wrong
/// types, unknown keys). Messages carry a line number where one exists.
class parse_error : public error {
public:
    using error::error;
};

/// Well-formed input that violates a domain invariant: unknown concept,
/// dimension mismatch, duplicate id, cycle, out-of-range flag, ...
class validation_error : public error {
public:
    using error::error;
};

} // namespace tracecbr

#endif

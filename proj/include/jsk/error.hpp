#pragma once

#include <stdexcept>
#include <string>

namespace jsk {

/// Base of every error thrown by the library. `exit_code()` is the process
/// status the command-line tool reports for it.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
};

class UsageError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 1; }
};

/// Malformed query document, unsupported join graph, or a sketch file that
/// does not fit the query.
class QueryError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

/// Unreadable or malformed input data (CSV sources, sketch files).
class DataError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

/// A computation refused because it would exceed its work budget.
class BudgetError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

}  // namespace jsk

#pragma once

#include <stdexcept>
#include <string>

namespace invox {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input data (wrong column count, bad JSON/XML, unknown enum string).
/// The message names the offending path or row.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Well-formed input that violates a document model invariant.
class InvariantError : public Error {
public:
    using Error::Error;
};

/// Invalid or missing configuration (empty dictionaries, bad thresholds).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Rule DSL parse failure; carries line/column and the expected-token set.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int column)
        : Error(msg), line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Rule evaluation hit a path with no defined accessor.
class EvalError : public Error {
public:
    using Error::Error;
};

/// Feature extraction requested a pipeline stage that has not run.
class StageError : public Error {
public:
    using Error::Error;
};

/// Training data contains a single class.
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

/// Feature vector does not match the schema the model was trained on.
class SchemaMismatchError : public Error {
public:
    using Error::Error;
};

/// Evaluation input lacks a report for a gold record.
class MissingReportError : public Error {
public:
    using Error::Error;
};

} // namespace invox

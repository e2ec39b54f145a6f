#pragma once

#include <stdexcept>
#include <string>

namespace mapmrf {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

class RepeatedMode : public Error {
public:
    explicit RepeatedMode(const std::string& what) : Error(what) {}
};

/// Text input could not be parsed; stores the 1-based line number.
class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class SchemaVersionMismatch : public Error {
public:
    explicit SchemaVersionMismatch(const std::string& what) : Error(what) {}
};

class SearchSpaceTooLarge : public Error {
public:
    explicit SearchSpaceTooLarge(const std::string& what) : Error(what) {}
};

class NotPairwise : public Error {
public:
    explicit NotPairwise(const std::string& what) : Error(what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace mapmrf

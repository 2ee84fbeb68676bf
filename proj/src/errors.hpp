#pragma once
#include <stdexcept>
#include <string>

namespace episeir {

// Base class for all engine errors surfaced through the C API.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Failure while reading a text input (mesh file, CSV, config); carries the line.
class ParseError : public Error {
public:
    ParseError(const std::string& context, long line, const std::string& what)
        : Error(context + ", line " + std::to_string(line) + ": " + what), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

class SolverError : public Error {
public:
    SolverError(const std::string& what, double achieved_residual)
        : Error(what), achieved_residual_(achieved_residual) {}
    double achieved_residual() const { return achieved_residual_; }

private:
    double achieved_residual_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace episeir

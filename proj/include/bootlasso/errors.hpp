#pragma once

#include <stdexcept>
#include <string>

namespace bootlasso {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConstantColumnError : public Error {
public:
    explicit ConstantColumnError(int column, const std::string& name = "")
        : Error("constant column " + std::to_string(column + 1) +
                (name.empty() ? "" : " ('" + name + "')") + ": zero variance"),
          column(column) {}
    int column;
};

class NonFiniteInputError : public Error {
public:
    NonFiniteInputError(long row, int column, const std::string& what_field)
        : Error("non-finite value in " + what_field + " at row " + std::to_string(row + 1) +
                ", column " + std::to_string(column + 1)),
          row(row), column(column) {}
    long row;
    int column;
};

class NoPositiveWeightError : public Error {
public:
    NoPositiveWeightError() : Error("weight vector has no positive entry") {}
};

class DidNotConvergeError : public Error {
public:
    explicit DidNotConvergeError(int max_sweeps, const std::string& context = "")
        : Error("coordinate descent did not converge within " + std::to_string(max_sweeps) +
                " sweeps" + (context.empty() ? "" : " (" + context + ")")),
          max_sweeps(max_sweeps) {}
    int max_sweeps;
};

class InvalidShapeError : public Error {
public:
    using Error::Error;
};

class InvalidFoldCountError : public Error {
public:
    using Error::Error;
};

class InvalidMError : public Error {
public:
    using Error::Error;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

class IndexOutOfRangeError : public Error {
public:
    using Error::Error;
};

class FoldTooSmallError : public Error {
public:
    using Error::Error;
};

class AllReplicatesDegenerateError : public Error {
public:
    using Error::Error;
};

class DegenerateTruthError : public Error {
public:
    using Error::Error;
};

class CsvParseError : public Error {
public:
    CsvParseError(const std::string& path, long line, int column, const std::string& detail)
        : Error(path + ": row " + std::to_string(line) + ", column " + std::to_string(column) +
                ": " + detail),
          line(line), column(column) {}
    long line;
    int column;
};

class ConfigParseError : public Error {
public:
    ConfigParseError(const std::string& path, long line, const std::string& detail)
        : Error(path + ":" + std::to_string(line) + ": " + detail), line(line) {}
    long line;
};

}  // namespace bootlasso

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace oli {

/// Position of a construct in a source file. Lines and columns are 1-based.
///
/// Locations never take part in structural equality of syntax trees, so two
/// ASTs parsed from differently formatted sources still compare equal.
struct SourceLoc {
    std::string file;
    std::uint32_t line = 0;
    std::uint32_t column = 0;

    friend bool operator==(const SourceLoc&, const SourceLoc&) { return true; }

    std::string str() const {
        return file + ":" + std::to_string(line) + ":" + std::to_string(column);
    }
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An error anchored at a source position.
class LocatedError : public Error {
public:
    LocatedError(const std::string& what, SourceLoc loc)
        : Error(loc.file.empty() ? what : loc.str() + ": " + what), loc_(std::move(loc)) {}

    const SourceLoc& loc() const noexcept { return loc_; }

private:
    SourceLoc loc_;
};

class LexError : public LocatedError {
public:
    using LocatedError::LocatedError;
};

class ParseError : public LocatedError {
public:
    using LocatedError::LocatedError;
};

class IncludeError : public LocatedError {
public:
    using LocatedError::LocatedError;
};

class UnresolvedLink : public Error {
public:
    using Error::Error;
};

class CyclicTypeError : public Error {
public:
    using Error::Error;
};

class EvalError : public Error {
public:
    using Error::Error;
};

class BuildError : public Error {
public:
    using Error::Error;
};

class EncodeError : public Error {
public:
    using Error::Error;
};

class DecodeError : public Error {
public:
    using Error::Error;
};

class LocationError : public Error {
public:
    using Error::Error;
};

class ConnectError : public Error {
public:
    using Error::Error;
};

class BindError : public Error {
public:
    using Error::Error;
};

class TimeoutError : public Error {
public:
    using Error::Error;
};

class ChannelClosed : public Error {
public:
    using Error::Error;
};

/// A source file could not be read.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace oli

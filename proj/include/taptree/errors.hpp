#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace taptree {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input line (not valid JSON).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what), position(position) {}
    std::size_t position;
};

// Structurally valid record with a missing or unusable mandatory field.
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& key)
        : Error("missing or invalid field: " + key), key(key) {}
    std::string key;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Too large a fraction of the input stream failed to parse.
class CorruptInputError : public Error {
public:
    using Error::Error;
};

class MergePreconditionError : public Error {
public:
    using Error::Error;
};

class EmptyModelError : public Error {
public:
    using Error::Error;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

class EmptyForestError : public Error {
public:
    using Error::Error;
};

class SingleClassError : public Error {
public:
    using Error::Error;
};

class VersionMismatchError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

// Operation applied to a baseline model in the wrong pipeline stage.
class StageError : public Error {
public:
    using Error::Error;
};

}  // namespace taptree

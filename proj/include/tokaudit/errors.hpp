#pragma once

#include <stdexcept>
#include <string>

namespace tokaudit {

// Base class for all toolkit errors. The CLI maps these to exit code 1;
// usage errors (bad flags) are exit code 2 and never reach this hierarchy.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file (registry, tokenizer model, CSV/TSV, manifest).
class FormatError : public Error {
public:
    using Error::Error;
};

// Structurally valid file whose contents violate a model invariant
// (e.g. a merge whose concatenation is missing from the vocabulary).
class IntegrityError : public Error {
public:
    using Error::Error;
};

// File system failures: missing file, unreadable path, unwritable output.
class IoError : public Error {
public:
    using Error::Error;
};

// Parallel corpus line counts disagree.
class AlignmentError : public Error {
public:
    using Error::Error;
};

// Invalid UTF-8 in an input that is required to be text.
class EncodingError : public Error {
public:
    explicit EncodingError(const std::string& msg, size_t byte_offset)
        : Error(msg), offset(byte_offset) {}
    size_t offset;
};

// Unknown key: language code absent from a registry or corpus.
class LookupError : public Error {
public:
    using Error::Error;
};

// Inconsistent run configuration (missing reference language, missing scorer).
class ConfigError : public Error {
public:
    using Error::Error;
};

// A caller-supplied value is out of range.
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Well-formed data that cannot be used: negative NLL, all-skipped statistics,
// insufficient or constant vectors for correlation.
class DataError : public Error {
public:
    using Error::Error;
};

} // namespace tokaudit

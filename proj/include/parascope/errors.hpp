#pragma once

#include <stdexcept>
#include <string>

namespace parascope {

// Error taxonomy used across the pipeline. Every category is still a
// std::runtime_error so callers that do not care can catch one type.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct AdapterError : Error {
    using Error::Error;
};

// Capture spec rejected (unknown stream, bad layer/position lists).
struct SpecError : Error {
    using Error::Error;
};

// Token position outside the tokenized context.
struct IndexError : Error {
    using Error::Error;
};

// Context does not fit the model window.
struct LengthError : Error {
    using Error::Error;
};

// Patch payload incomplete or malformed.
struct PatchError : Error {
    using Error::Error;
};

// Patch produced by a different model than the adapter it is applied to.
struct CompatibilityError : Error {
    using Error::Error;
};

struct StatsError : Error {
    using Error::Error;
};

struct StorageError : Error {
    using Error::Error;
};

struct FormatError : Error {
    using Error::Error;
};

struct DataError : Error {
    using Error::Error;
};

struct TrainError : Error {
    using Error::Error;
};

struct FeatureError : Error {
    using Error::Error;
};

struct MapError : Error {
    using Error::Error;
};

struct DecodeError : Error {
    using Error::Error;
};

struct ClientError : Error {
    using Error::Error;
};

struct JudgeError : Error {
    using Error::Error;
};

struct EvalError : Error {
    using Error::Error;
};

struct RangeError : Error {
    using Error::Error;
};

struct AlignmentError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct ReportError : Error {
    using Error::Error;
};

}  // namespace parascope

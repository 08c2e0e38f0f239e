#pragma once
#include <stdexcept>
#include <string>

namespace blicket {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad or missing configuration (CLI arguments, config files, data files).
struct ConfigError : Error {
    using Error::Error;
};

// Prompt template instantiation failed (unknown or unbound placeholder).
struct TemplateError : Error {
    using Error::Error;
};

// Strict hypothesis-syntax violation (arity or malformed tokens).
struct DslError : Error {
    using Error::Error;
};

// Chat backend failed to produce a reply (network failure after retries,
// malformed response payload, scripted backend exhausted).
struct BackendError : Error {
    using Error::Error;
};

// Replay log does not match the requests being issued.
struct ReplayMismatchError : BackendError {
    using BackendError::BackendError;
};

// A persisted trial record fails its internal consistency checks.
struct CorruptRecordError : Error {
    using Error::Error;
};

// An observation contradicts every hypothesis in the space.
struct InconsistentHistoryError : Error {
    using Error::Error;
};

}

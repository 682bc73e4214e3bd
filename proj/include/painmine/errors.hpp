#pragma once

#include <stdexcept>
#include <string>

namespace painmine {

// Bad configuration: invalid regex rule, out-of-range hyperparameter,
// unknown config key, missing input path.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input data: parse failures, duplicate ids,
// empty corpora, label/vocabulary mismatches.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// A document with zero in-vocabulary tokens cannot be classified or
// attributed. Kept distinct from DataError so callers can skip such docs.
class UnattributableDocument : public std::runtime_error {
public:
    explicit UnattributableDocument(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace painmine

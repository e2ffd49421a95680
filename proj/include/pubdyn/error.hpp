#pragma once

#include <stdexcept>
#include <string>

namespace pubdyn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Source could not be opened or read.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Header or column layout does not match the expected table schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of an operation (empty url, support < 1, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid user-supplied configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input parsed but holds nothing to analyze.
class EmptyCorpusError : public Error {
 public:
  using Error::Error;
};

}  // namespace pubdyn

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cohana {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Query text could not be tokenized or parsed. `position()` is a byte offset
/// into the query text.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A syntactically valid query that does not type-check against a schema.
class ValidationError : public Error {
 public:
  using Error::Error;
};

enum class StorageErrorKind {
  Io,
  BadMagic,
  VersionMismatch,
  Truncated,
  ChecksumMismatch,
  Corrupt,
  InvalidInput,
};

const char* to_string(StorageErrorKind kind) noexcept;

class StorageError : public Error {
 public:
  StorageError(StorageErrorKind kind, const std::string& message)
      : Error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  StorageErrorKind kind() const noexcept { return kind_; }

 private:
  StorageErrorKind kind_;
};

enum class IngestErrorKind {
  Io,
  Parse,
  MissingField,
  DuplicateKey,
};

/// Row-addressed ingestion failure. Rows are 1-based data rows (the header
/// line is not counted); row 0 means the error is not tied to a row.
class IngestError : public Error {
 public:
  IngestError(IngestErrorKind kind, std::size_t row, const std::string& message)
      : Error(row == 0 ? message : "row " + std::to_string(row) + ": " + message),
        kind_(kind),
        row_(row) {}

  IngestErrorKind kind() const noexcept { return kind_; }
  std::size_t row() const noexcept { return row_; }

 private:
  IngestErrorKind kind_;
  std::size_t row_;
};

}  // namespace cohana

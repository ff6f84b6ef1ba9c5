#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sqlaug {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or record.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A domain invariant does not hold (bad indices, duplicate names, ...).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// A table or column reference that cannot be resolved against a schema.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// SQL outside the subset understood by the tokenizer/parser.
class SqlError : public Error {
 public:
  using Error::Error;
};

/// A model used before training or with mismatched inputs.
class ModelError : public Error {
 public:
  using Error::Error;
};

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Replaces underscores with spaces, collapses runs of spaces, lowercases.
std::string human_name(std::string_view identifier);

/// splitmix64 finalizer, used for seed derivation and hashing of small keys.
std::uint64_t mix64(std::uint64_t x);

/// Derives a child seed from a parent seed and a component label.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

/// Hex-encoded SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Reads a whole file; throws Error when it cannot be opened.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace sqlaug

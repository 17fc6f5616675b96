#pragma once

#include <stdexcept>
#include <string>

namespace nbprior {

/// Base for every error raised on bad input data or violated preconditions.
/// The CLI maps these to exit code 2; anything else is an internal failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IngestError : public Error {
 public:
  IngestError(const std::string& what, long long byte_offset)
      : Error(what + " (at byte " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}

  long long byte_offset() const noexcept { return byte_offset_; }

 private:
  long long byte_offset_;
};

class LoadError : public Error {
 public:
  LoadError(const std::string& what, std::string shard)
      : Error(shard + ": " + what), shard_(std::move(shard)) {}

  const std::string& shard() const noexcept { return shard_; }

 private:
  std::string shard_;
};

}  // namespace nbprior

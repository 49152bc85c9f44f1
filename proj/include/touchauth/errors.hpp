#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace touchauth {

// Base of every error the toolkit throws. ConfigError maps to CLI exit
// code 1, DataError to exit code 2.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct DataError : Error {
  using Error::Error;
};

struct MalformedRowError : DataError {
  MalformedRowError(std::size_t line_no, const std::string& what)
      : DataError("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
  std::size_t line;
};

struct UserTooSmallError : DataError {
  explicit UserTooSmallError(const std::string& user)
      : DataError("user '" + user + "' has fewer than 2 swipes"), user_id(user) {}
  std::string user_id;
};

struct DegenerateSwipeError : DataError {
  using DataError::DataError;
};

struct EmptySeriesError : Error {
  using Error::Error;
};

struct SingleClassError : DataError {
  using DataError::DataError;
};

struct MinorityTooSmallError : DataError {
  using DataError::DataError;
};

struct NonFiniteLossError : Error {
  NonFiniteLossError(std::size_t epoch_no, const std::string& what)
      : Error("epoch " + std::to_string(epoch_no) + ": " + what), epoch(epoch_no) {}
  std::size_t epoch;
};

struct DimensionMismatchError : Error {
  using Error::Error;
};

struct EmptyPoolError : DataError {
  using DataError::DataError;
};

struct NoImpostorDataError : DataError {
  explicit NoImpostorDataError(const std::string& dataset)
      : DataError("no impostor windows available in dataset '" + dataset + "'"),
        dataset_id(dataset) {}
  std::string dataset_id;
};

struct TooFewSamplesError : DataError {
  using DataError::DataError;
};

struct GroupTooSmallError : DataError {
  using DataError::DataError;
};

struct SingleClassFoldError : DataError {
  using DataError::DataError;
};

struct EmptyListError : Error {
  using Error::Error;
};

struct InsufficientGenuineDataError : DataError {
  using DataError::DataError;
};

}  // namespace touchauth

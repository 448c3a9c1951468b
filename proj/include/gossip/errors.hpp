#pragma once

#include <stdexcept>
#include <string>

namespace gossip {

struct EmptyHistoryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ThresholdExceedsMassError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedFileError : std::runtime_error {
    MalformedFileError(const std::string& what, std::size_t byte_offset)
        : std::runtime_error(what + " (byte offset " +
                             std::to_string(byte_offset) + ")"),
          offset(byte_offset) {}
    std::size_t offset;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace gossip

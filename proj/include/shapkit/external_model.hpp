#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

#include "shapkit/blackbox.hpp"

namespace shapkit {

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Out-of-process model speaking newline-delimited JSON over a child
/// process's stdin/stdout. Requests carry monotonically increasing ids;
/// concurrent callers are serialized over the single transport.
///
///   {"id":0,"op":"meta"}                         -> {"id":0,"feature_count":m}
///   {"id":k,"op":"predict","instances":[[..]..]} -> {"id":k,"predictions":[..]}
class ExternalModel final : public BlackBoxModel {
public:
    explicit ExternalModel(const std::string& command,
                           std::chrono::milliseconds timeout = std::chrono::seconds(10));
    ~ExternalModel() override;

    ExternalModel(const ExternalModel&) = delete;
    ExternalModel& operator=(const ExternalModel&) = delete;

    std::size_t feature_count() const override { return feature_count_; }
    std::vector<double> predict(const Matrix& batch) const override;

private:
    std::string roundtrip(const std::string& request_line) const;

    int child_pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::chrono::milliseconds timeout_;
    std::size_t feature_count_ = 0;
    mutable std::uint64_t next_id_ = 0;
    mutable std::string read_buffer_;
    mutable std::mutex mutex_;
};

}  // namespace shapkit

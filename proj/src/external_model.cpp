#include "shapkit/external_model.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace shapkit {

ExternalModel::ExternalModel(const std::string& command, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
    int to_child[2];
    int from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0)
        throw TransportError("external model: pipe() failed");

    const pid_t pid = fork();
    if (pid < 0) throw TransportError("external model: fork() failed");
    if (pid == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        execlp("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    child_pid_ = pid;
    to_child_ = to_child[1];
    from_child_ = from_child[0];
    close(to_child[0]);
    close(from_child[1]);

    // Handshake: feature count from the meta request.
    nlohmann::json meta;
    meta["id"] = next_id_;
    meta["op"] = "meta";
    const std::string reply = roundtrip(meta.dump());
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(reply);
    } catch (const nlohmann::json::exception&) {
        throw ProtocolError("external model: malformed handshake response: " +
                            reply.substr(0, 200));
    }
    if (!parsed.contains("id") || parsed["id"].get<std::uint64_t>() != next_id_ ||
        !parsed.contains("feature_count"))
        throw ProtocolError("external model: bad handshake response: " + reply.substr(0, 200));
    feature_count_ = parsed["feature_count"].get<std::size_t>();
    if (feature_count_ == 0) throw ProtocolError("external model: feature_count must be > 0");
    ++next_id_;
}

ExternalModel::~ExternalModel() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    if (child_pid_ > 0) {
        int status = 0;
        if (waitpid(child_pid_, &status, WNOHANG) == 0) {
            kill(child_pid_, SIGTERM);
            waitpid(child_pid_, &status, 0);
        }
    }
}

std::string ExternalModel::roundtrip(const std::string& request_line) const {
    const std::string payload = request_line + "\n";
    std::size_t written = 0;
    while (written < payload.size()) {
        const ssize_t n = write(to_child_, payload.data() + written, payload.size() - written);
        if (n <= 0) throw TransportError("external model: child closed stdin pipe");
        written += static_cast<std::size_t>(n);
    }

    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    for (;;) {
        const auto newline = read_buffer_.find('\n');
        if (newline != std::string::npos) {
            std::string line = read_buffer_.substr(0, newline);
            read_buffer_.erase(0, newline + 1);
            return line;
        }
        const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0)
            throw TransportError("external model: response timeout after " +
                                 std::to_string(timeout_.count()) + " ms");
        pollfd pfd{from_child_, POLLIN, 0};
        const int ready = poll(&pfd, 1, static_cast<int>(remaining.count()));
        if (ready < 0) throw TransportError("external model: poll() failed");
        if (ready == 0)
            throw TransportError("external model: response timeout after " +
                                 std::to_string(timeout_.count()) + " ms");
        char chunk[4096];
        const ssize_t n = read(from_child_, chunk, sizeof(chunk));
        if (n <= 0) throw TransportError("external model: child exited mid-request");
        read_buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

std::vector<double> ExternalModel::predict(const Matrix& batch) const {
    check_batch(batch);
    if (batch.empty()) return {};
    std::lock_guard<std::mutex> lock(mutex_);

    const std::uint64_t id = next_id_++;
    nlohmann::json request;
    request["id"] = id;
    request["op"] = "predict";
    request["instances"] = batch;
    const std::string reply = roundtrip(request.dump());

    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(reply);
    } catch (const nlohmann::json::exception&) {
        throw ProtocolError("external model: malformed response: " + reply.substr(0, 200));
    }
    if (!parsed.contains("id") || parsed["id"].get<std::uint64_t>() != id)
        throw ProtocolError("external model: response id mismatch: " + reply.substr(0, 200));
    if (!parsed.contains("predictions") || !parsed["predictions"].is_array() ||
        parsed["predictions"].size() != batch.size())
        throw ProtocolError("external model: bad predictions payload: " + reply.substr(0, 200));
    return parsed["predictions"].get<std::vector<double>>();
}

}  // namespace shapkit

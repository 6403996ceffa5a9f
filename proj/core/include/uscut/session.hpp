#pragma once

#include "uscut/config.hpp"

#include <nlohmann/json.hpp>

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

namespace uscut {

struct SegmentationResult;
class GrayImage;

inline constexpr int kProtocolVersion = 1;

/// Receives every outgoing protocol message of a session. Called from the
/// session's worker thread (or the submitting thread for malformed input).
using MessageSink = std::function<void(const nlohmann::json&)>;

/// One interactive segmentation: an image, the current seed and helpers, and
/// the last result. Events are processed strictly in order on a private
/// worker thread; a seed_move that is already superseded by a queued
/// seed_move is dropped without a reply (latest wins).
class Session {
public:
    Session(std::string id, TemplateConfig cfg, MessageSink sink);
    ~Session();

    Session(const Session&) = delete;
    Session& operator=(const Session&) = delete;

    /// Queues one client message. Messages without a valid `v`, `kind` and a
    /// strictly increasing `seq` are answered with an error immediately.
    void submit(const nlohmann::json& message);
    /// Parses one JSON text and submits it; malformed text gets an error reply.
    void submit_text(const std::string& text);

    /// Blocks until every queued message has been processed.
    void wait_idle();

    const std::string& id() const noexcept { return id_; }

private:
    struct State;

    void run();
    void process(const nlohmann::json& message);
    void reply(nlohmann::json message);
    void fail(const nlohmann::json& request, const std::string& reason);

    std::string id_;
    TemplateConfig cfg_;
    MessageSink sink_;

    std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable idle_;
    std::deque<nlohmann::json> queue_;
    bool busy_ = false;
    bool stopping_ = false;
    std::optional<std::int64_t> last_seq_;

    std::unique_ptr<State> state_;
    std::thread worker_;
};

/// Routes messages to sessions by their optional `session` field ("default"
/// when absent), creating sessions on first use.
class SessionService {
public:
    explicit SessionService(TemplateConfig cfg = {});

    /// Parses one line of JSON and forwards it; replies go to `sink`, which is
    /// bound to a session when that session is created.
    void handle_line(const std::string& line, const MessageSink& sink);
    void handle(const nlohmann::json& message, const MessageSink& sink);

    void wait_idle();
    std::size_t session_count() const;

    /// Stdio mode: one message per input line, one message per output line.
    /// Returns after end of input once every session is idle.
    void serve_stdio(std::istream& in, std::ostream& out);

private:
    TemplateConfig cfg_;
    mutable std::mutex mutex_;
    std::map<std::string, std::unique_ptr<Session>> sessions_;
};

/// Serializes a message the way it travels on the wire (compact JSON).
std::string encode_message(const nlohmann::json& message);

} // namespace uscut

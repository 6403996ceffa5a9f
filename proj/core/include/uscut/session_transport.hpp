#pragma once

#include "uscut/config.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace uscut {

/// WebSocket endpoint for the session protocol: one text frame per message,
/// one Session per connection. Runs on the calling thread until stop().
class WebSocketServer {
public:
    /// Binds immediately; port 0 picks a free port (see port()).
    WebSocketServer(const std::string& address, std::uint16_t port, TemplateConfig cfg = {});
    ~WebSocketServer();

    WebSocketServer(const WebSocketServer&) = delete;
    WebSocketServer& operator=(const WebSocketServer&) = delete;

    std::uint16_t port() const noexcept;

    /// Accepts connections until stop() is called.
    void run();
    /// Thread-safe; closes the listener and all connections.
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace uscut

#include "uscut/session_transport.hpp"

#include "uscut/error.hpp"
#include "uscut/session.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <deque>
#include <vector>

namespace uscut {
namespace {

namespace beast = boost::beast;
namespace net = boost::asio;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

class Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(tcp::socket socket, net::io_context& ioc, const TemplateConfig& cfg, std::string id)
        : ws_(std::move(socket)), ioc_(ioc), cfg_(cfg), id_(std::move(id))
    {
    }

    void start()
    {
        std::weak_ptr<Connection> weak = shared_from_this();
        net::io_context& ioc = ioc_;
        // Replies come from the session worker; hop onto the io thread before touching the stream.
        session_ = std::make_unique<Session>(id_, cfg_, [weak, &ioc](const nlohmann::json& m) {
            net::post(ioc, [weak, text = encode_message(m)]() mutable {
                if (auto self = weak.lock()) {
                    self->send(std::move(text));
                }
            });
        });
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
            if (!ec) {
                self->read();
            }
        });
    }

    void close()
    {
        beast::error_code ec;
        beast::get_lowest_layer(ws_).socket().close(ec);
    }

private:
    void read()
    {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                return;
            }
            const std::string text = beast::buffers_to_string(self->buffer_.data());
            self->buffer_.consume(self->buffer_.size());
            self->session_->submit_text(text);
            self->read();
        });
    }

    void send(std::string text)
    {
        outbox_.push_back(std::move(text));
        if (outbox_.size() == 1) {
            write_next();
        }
    }

    void write_next()
    {
        ws_.text(true);
        ws_.async_write(net::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->outbox_.clear();
                return;
            }
            self->outbox_.pop_front();
            if (!self->outbox_.empty()) {
                self->write_next();
            }
        });
    }

    websocket::stream<beast::tcp_stream> ws_;
    net::io_context& ioc_;
    TemplateConfig cfg_;
    std::string id_;
    beast::flat_buffer buffer_;
    std::deque<std::string> outbox_;
    std::unique_ptr<Session> session_;
};

} // namespace

struct WebSocketServer::Impl {
    net::io_context ioc{1};
    tcp::acceptor acceptor{ioc};
    TemplateConfig cfg;
    std::vector<std::weak_ptr<Connection>> connections;
    std::uint64_t next_id = 1;

    void accept()
    {
        acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
            if (ec) {
                return;
            }
            auto conn = std::make_shared<Connection>(std::move(socket), ioc, cfg, "ws-" + std::to_string(next_id++));
            connections.push_back(conn);
            conn->start();
            accept();
        });
    }
};

WebSocketServer::WebSocketServer(const std::string& address, std::uint16_t port, TemplateConfig cfg)
    : impl_(std::make_unique<Impl>())
{
    cfg.validate();
    impl_->cfg = std::move(cfg);
    try {
        const tcp::endpoint endpoint(net::ip::make_address(address), port);
        impl_->acceptor.open(endpoint.protocol());
        impl_->acceptor.set_option(net::socket_base::reuse_address(true));
        impl_->acceptor.bind(endpoint);
        impl_->acceptor.listen();
    } catch (const boost::system::system_error& e) {
        throw IoError("cannot listen on " + address + ":" + std::to_string(port) + ": " + e.what());
    }
}

WebSocketServer::~WebSocketServer() = default;

std::uint16_t WebSocketServer::port() const noexcept
{
    beast::error_code ec;
    return impl_->acceptor.local_endpoint(ec).port();
}

void WebSocketServer::run()
{
    impl_->accept();
    impl_->ioc.run();
}

void WebSocketServer::stop()
{
    net::post(impl_->ioc, [impl = impl_.get()] {
        beast::error_code ec;
        impl->acceptor.close(ec);
        for (auto& weak : impl->connections) {
            if (auto conn = weak.lock()) {
                conn->close();
            }
        }
        impl->connections.clear();
        impl->ioc.stop();
    });
}

} // namespace uscut

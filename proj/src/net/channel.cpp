#include "pixelarena/channel.hpp"

#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

#include <boost/asio.hpp>

namespace pixelarena {

namespace {

namespace asio = boost::asio;
using asio::ip::tcp;

// Received messages plus the terminal state of the stream.
class Inbox {
public:
    void push(Message m) {
        {
            std::lock_guard lock(mu_);
            queue_.push_back(std::move(m));
        }
        cv_.notify_all();
    }
    void close() {
        {
            std::lock_guard lock(mu_);
            closed_ = true;
        }
        cv_.notify_all();
    }
    void fail(const ProtocolError& e) {
        {
            std::lock_guard lock(mu_);
            error_ = e;
            closed_ = true;
        }
        cv_.notify_all();
    }
    std::optional<Message> pop_until(Channel::Clock::time_point deadline, const std::string& who) {
        std::unique_lock lock(mu_);
        cv_.wait_until(lock, deadline, [&] { return !queue_.empty() || closed_; });
        if (!queue_.empty()) {
            Message m = std::move(queue_.front());
            queue_.pop_front();
            return m;
        }
        if (error_) throw *error_;
        if (closed_) throw ChannelClosed("connection to " + who + " closed");
        return std::nullopt;
    }
    bool closed() const {
        std::lock_guard lock(mu_);
        return closed_;
    }

private:
    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Message> queue_;
    bool closed_ = false;
    std::optional<ProtocolError> error_;
};

class MemoryChannel : public Channel {
public:
    MemoryChannel(std::shared_ptr<Inbox> in, std::shared_ptr<Inbox> out, std::string name)
        : in_(std::move(in)), out_(std::move(out)), name_(std::move(name)) {}
    ~MemoryChannel() override { close(); }

    void send(const Message& m) override {
        if (out_->closed()) throw ChannelClosed("memory peer " + name_ + " closed");
        // Round-trip through the codec so both transports see identical bytes.
        out_->push(decode(encode(m)));
    }
    std::optional<Message> receive_until(Clock::time_point deadline) override { return in_->pop_until(deadline, name_); }
    void close() override {
        in_->close();
        out_->close();
    }
    std::string peer() const override { return name_; }

private:
    std::shared_ptr<Inbox> in_, out_;
    std::string name_;
};

class TcpChannel : public Channel {
public:
    explicit TcpChannel(tcp::socket socket) : socket_(std::move(socket)) {
        boost::system::error_code ec;
        socket_.set_option(tcp::no_delay(true), ec);
        auto ep = socket_.remote_endpoint(ec);
        name_ = ec ? "tcp peer" : ep.address().to_string() + ":" + std::to_string(ep.port());
        reader_ = std::thread([this] { read_loop(); });
    }
    ~TcpChannel() override {
        close();
        if (reader_.joinable()) reader_.join();
    }

    void send(const Message& m) override {
        const auto bytes = encode(m);
        std::lock_guard lock(write_mu_);
        boost::system::error_code ec;
        asio::write(socket_, asio::buffer(bytes), ec);
        if (ec) throw ChannelClosed("send to " + name_ + " failed: " + ec.message());
    }
    std::optional<Message> receive_until(Clock::time_point deadline) override { return inbox_.pop_until(deadline, name_); }
    void close() override {
        std::lock_guard lock(write_mu_);
        boost::system::error_code ec;
        socket_.shutdown(tcp::socket::shutdown_both, ec);
    }
    std::string peer() const override { return name_; }

private:
    void read_loop() {
        FrameDecoder decoder;
        std::array<std::uint8_t, 4096> buf{};
        for (;;) {
            boost::system::error_code ec;
            const std::size_t n = socket_.read_some(asio::buffer(buf), ec);
            if (ec) {
                inbox_.close();
                return;
            }
            decoder.feed(std::span(buf.data(), n));
            try {
                while (auto m = decoder.next()) inbox_.push(std::move(*m));
            } catch (const ProtocolError& e) {
                inbox_.fail(e);
                return;
            }
        }
    }

    tcp::socket socket_;
    std::string name_;
    std::mutex write_mu_;
    Inbox inbox_;
    std::thread reader_;
};

}  // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> memory_channel_pair() {
    auto a = std::make_shared<Inbox>();
    auto b = std::make_shared<Inbox>();
    return {std::make_unique<MemoryChannel>(a, b, "memory:b"), std::make_unique<MemoryChannel>(b, a, "memory:a")};
}

// Sockets outlive the io_context used to open them, so each connection gets a
// context that lives in a shared static; sync reads and writes do not need it running.
static asio::io_context& shared_io() {
    static asio::io_context io;
    return io;
}

std::unique_ptr<Channel> tcp_connect(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout) {
    asio::io_context io;
    tcp::resolver resolver(io);
    boost::system::error_code ec;
    const auto endpoints = resolver.resolve(host, std::to_string(port), ec);
    if (ec) throw ChannelClosed("cannot resolve " + host + ": " + ec.message());
    tcp::socket socket(shared_io());
    const auto deadline = Channel::Clock::now() + timeout;
    for (;;) {
        for (const auto& ep : endpoints) {
            socket.close(ec);
            socket.connect(ep.endpoint(), ec);
            if (!ec) return std::make_unique<TcpChannel>(std::move(socket));
        }
        if (Channel::Clock::now() >= deadline)
            throw ChannelClosed("cannot connect to " + host + ":" + std::to_string(port) + ": " + ec.message());
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
}

struct TcpListener::Impl {
    asio::io_context io;
    tcp::acceptor acceptor{io};
};

TcpListener::TcpListener(std::uint16_t port, const std::string& address) : impl_(std::make_unique<Impl>()) {
    const tcp::endpoint ep(asio::ip::make_address(address), port);
    impl_->acceptor.open(ep.protocol());
    impl_->acceptor.set_option(tcp::acceptor::reuse_address(true));
    impl_->acceptor.bind(ep);
    impl_->acceptor.listen();
}

TcpListener::~TcpListener() = default;

std::uint16_t TcpListener::port() const { return impl_->acceptor.local_endpoint().port(); }

std::unique_ptr<Channel> TcpListener::accept(std::chrono::milliseconds timeout) {
    tcp::socket socket(shared_io());
    bool done = false;
    boost::system::error_code result;
    impl_->acceptor.async_accept(socket, [&](const boost::system::error_code& ec) {
        done = true;
        result = ec;
    });
    impl_->io.restart();
    impl_->io.run_for(timeout);
    if (!done) {
        impl_->acceptor.cancel();
        impl_->io.restart();
        impl_->io.run();
    }
    if (result) return nullptr;
    return std::make_unique<TcpChannel>(std::move(socket));
}

}  // namespace pixelarena

#include "pixelarena/ws_bridge.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include "json.hpp"

#include "pixelarena/bytes.hpp"
#include "pixelarena/log.hpp"
#include "pixelarena/scenario.hpp"

namespace pixelarena {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using json = nlohmann::json;

std::vector<std::uint8_t> encode_bridge_frame(const BridgeFrameHeader& h, std::span<const std::uint8_t> pixels) {
    ByteWriter w;
    w.put(h.tic);
    w.put(h.width);
    w.put(h.height);
    w.put(static_cast<std::uint8_t>(h.kind));
    w.put(h.format);
    for (int i = 0; i < 6; ++i) w.put(std::uint8_t{0});
    w.bytes(pixels);
    return w.take();
}

BridgeFrameHeader decode_bridge_header(std::span<const std::uint8_t> frame) {
    if (frame.size() < kBridgeHeaderSize) throw std::invalid_argument("bridge frame shorter than its header");
    ByteReader r(frame);
    BridgeFrameHeader h;
    h.tic = *r.get<std::uint32_t>();
    h.width = *r.get<std::uint16_t>();
    h.height = *r.get<std::uint16_t>();
    const auto kind = *r.get<std::uint8_t>();
    if (kind > 3) throw std::invalid_argument("unknown buffer kind");
    h.kind = static_cast<BufferKind>(kind);
    h.format = *r.get<std::uint8_t>();
    return h;
}

namespace {

std::uint32_t button_mask(const std::string& name) {
    const auto b = button_from_string(name);
    if (!b || *b == Button::turn_delta) throw std::invalid_argument("unknown button '" + name + "'");
    // Button order matches ButtonBit for the binary buttons.
    return 1u << static_cast<int>(*b);
}

}  // namespace

Action parse_bridge_input(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("input") || !j["input"].is_object()) throw std::invalid_argument("expected {\"input\": {...}}");
    const json& in = j["input"];
    Action a;
    if (in.contains("buttons")) {
        const json& b = in["buttons"];
        if (b.is_array()) {
            for (const auto& v : b) {
                if (!v.is_string()) throw std::invalid_argument("buttons must be names");
                a.buttons |= button_mask(v.get<std::string>());
            }
        } else if (b.is_number_unsigned()) {
            a.buttons = b.get<std::uint32_t>() & 0x1FFu;
        } else {
            throw std::invalid_argument("buttons must be an array of names or a bitmask");
        }
    }
    if (in.contains("turn_delta")) {
        if (!in["turn_delta"].is_number()) throw std::invalid_argument("turn_delta must be a number");
        const double deg = std::clamp(in["turn_delta"].get<double>(), -15.0, 15.0);
        a.turn_delta = static_cast<std::int16_t>(std::lround(deg * 100.0));
    }
    return a;
}

struct WsBridge::Impl : std::enable_shared_from_this<WsBridge::Impl> {
    struct Session : std::enable_shared_from_this<Session> {
        Session(tcp::socket s, std::shared_ptr<Impl> owner) : ws(std::move(s)), owner(std::move(owner)) {}

        websocket::stream<tcp::socket> ws;
        std::weak_ptr<Impl> owner;
        beast::flat_buffer buffer;
        struct Out {
            bool binary;
            std::shared_ptr<const std::vector<std::uint8_t>> data;
        };
        std::deque<Out> queue;
        bool writing = false;
        bool open = false;
        bool joined = false;
        bool closing = false;
        int slot = -1;  // player slot, -1 for spectators

        void start() {
            ws.async_accept([self = shared_from_this()](beast::error_code ec) {
                if (ec) return;
                self->open = true;
                self->read();
            });
        }
        void read() {
            ws.async_read(buffer, [self = shared_from_this()](beast::error_code ec, std::size_t) {
                if (ec) {
                    self->finish();
                    return;
                }
                const std::string text = beast::buffers_to_string(self->buffer.data());
                self->buffer.consume(self->buffer.size());
                const bool binary = self->ws.got_binary();
                if (binary || !self->on_text(text)) return;
                self->read();
            });
        }
        // False when the session is being closed.
        bool on_text(const std::string& text) {
            auto impl = owner.lock();
            if (!impl) return false;
            json j;
            try {
                j = json::parse(text);
            } catch (const json::parse_error&) {
                protocol_close("malformed JSON");
                return false;
            }
            if (!j.is_object()) {
                protocol_close("expected a JSON object");
                return false;
            }
            if (j.contains("join_as")) {
                if (!j["join_as"].is_string()) {
                    protocol_close("join_as must be a string");
                    return false;
                }
                const std::string role = j["join_as"].get<std::string>();
                const std::string name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : "browser";
                json reply;
                if (role == "player") {
                    slot = impl->claim_slot(name);
                    if (slot < 0) reply["error"] = "no free player slot; joined as spectator";
                } else if (role != "spectator") {
                    protocol_close("join_as must be \"spectator\" or \"player\"");
                    return false;
                }
                joined = true;
                reply["welcome"] = {{"role", slot >= 0 ? "player" : "spectator"},
                                    {"slot", slot >= 0 ? json(slot) : json(nullptr)},
                                    {"width", impl->options.render.width},
                                    {"height", impl->options.render.height},
                                    {"format", impl->options.render.format == ScreenFormat::rgb24 ? "RGB24" : "GRAY8"}};
                send_text(reply.dump());
                return true;
            }
            if (j.contains("input")) {
                Action a;
                try {
                    a = parse_bridge_input(text);
                } catch (const std::invalid_argument& e) {
                    protocol_close(e.what());
                    return false;
                }
                // Spectator input is ignored.
                if (slot >= 0) impl->set_input(slot, a);
                return true;
            }
            protocol_close("unknown message");
            return false;
        }
        void protocol_close(const std::string& why) {
            if (closing) return;
            closing = true;
            log::warn("ws bridge: closing client: {}", why);
            websocket::close_reason reason(websocket::close_code::protocol_error, why.substr(0, 120));
            ws.async_close(reason, [self = shared_from_this()](beast::error_code) { self->finish(); });
        }
        void finish() {
            open = false;
            if (auto impl = owner.lock()) impl->release(this);
        }
        void send_text(const std::string& s) {
            queue.push_back(Out{false, std::make_shared<const std::vector<std::uint8_t>>(s.begin(), s.end())});
            pump();
        }
        void send_binary(std::shared_ptr<const std::vector<std::uint8_t>> data) {
            // A slow browser loses old frames rather than growing the queue.
            std::size_t binary_queued = 0;
            for (const auto& o : queue) binary_queued += o.binary;
            if (binary_queued > 16) {
                for (auto it = queue.begin(); it != queue.end(); ++it)
                    if (it->binary && !(writing && it == queue.begin())) {
                        queue.erase(it);
                        break;
                    }
            }
            queue.push_back(Out{true, std::move(data)});
            pump();
        }
        void pump() {
            if (writing || queue.empty() || !open || closing) return;
            writing = true;
            ws.binary(queue.front().binary);
            ws.async_write(asio::buffer(*queue.front().data), [self = shared_from_this()](beast::error_code ec, std::size_t) {
                self->writing = false;
                if (ec) {
                    self->finish();
                    return;
                }
                self->queue.pop_front();
                self->pump();
            });
        }
    };

    BridgeOptions options;
    asio::io_context io;
    tcp::acceptor acceptor{io};
    std::thread thread;
    std::set<std::shared_ptr<Session>> sessions;  // io thread only

    mutable std::mutex mu;  // guards the fields below
    std::map<int, Action> inputs;
    std::map<int, std::string> holders;
    int clients = 0;

    int claim_slot(const std::string& name) {
        std::lock_guard lock(mu);
        for (int s : options.player_slots)
            if (!holders.count(s)) {
                holders[s] = name;
                inputs[s] = Action{};
                return s;
            }
        return -1;
    }
    void set_input(int slot, const Action& a) {
        std::lock_guard lock(mu);
        inputs[slot] = a;
    }
    void release(Session* s) {
        for (auto it = sessions.begin(); it != sessions.end(); ++it)
            if (it->get() == s) {
                std::lock_guard lock(mu);
                if (s->slot >= 0) {
                    holders.erase(s->slot);
                    inputs.erase(s->slot);
                }
                --clients;
                sessions.erase(it);
                return;
            }
    }
    void accept() {
        acceptor.async_accept([self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
            if (ec) return;
            auto session = std::make_shared<Session>(std::move(socket), self);
            self->sessions.insert(session);
            {
                std::lock_guard lock(self->mu);
                ++self->clients;
            }
            session->start();
            self->accept();
        });
    }
};

WsBridge::WsBridge(BridgeOptions options) : impl_(std::make_shared<Impl>()) {
    impl_->options = std::move(options);
    const tcp::endpoint ep(asio::ip::make_address(impl_->options.address), impl_->options.port);
    impl_->acceptor.open(ep.protocol());
    impl_->acceptor.set_option(tcp::acceptor::reuse_address(true));
    impl_->acceptor.bind(ep);
    impl_->acceptor.listen();
    impl_->accept();
    impl_->thread = std::thread([impl = impl_] { impl->io.run(); });
}

WsBridge::~WsBridge() {
    asio::post(impl_->io, [impl = impl_] {
        beast::error_code ec;
        impl->acceptor.close(ec);
        for (const auto& s : impl->sessions) s->ws.next_layer().close(ec);
        impl->sessions.clear();
        impl->io.stop();
    });
    if (impl_->thread.joinable()) impl_->thread.join();
}

std::uint16_t WsBridge::port() const { return impl_->acceptor.local_endpoint().port(); }

SlotController WsBridge::controller(int slot) {
    std::weak_ptr<Impl> weak = impl_;
    return [weak, slot](const WorldState&, int) {
        auto impl = weak.lock();
        if (!impl) return Action{};
        std::lock_guard lock(impl->mu);
        const auto it = impl->inputs.find(slot);
        return it == impl->inputs.end() ? Action{} : it->second;
    };
}

int WsBridge::client_count() const {
    std::lock_guard lock(impl_->mu);
    return impl_->clients;
}

int WsBridge::player_count() const {
    std::lock_guard lock(impl_->mu);
    return static_cast<int>(impl_->holders.size());
}

void WsBridge::publish(const WorldState& world, std::span<const std::string> names) {
    if (client_count() == 0) return;
    json board;
    board["tic"] = world.tic;
    board["players"] = json::array();
    for (const auto& a : world.actors) {
        const Counters& c = world.counters[static_cast<std::size_t>(a.id)];
        board["players"].push_back({{"slot", a.id},
                                    {"name", static_cast<std::size_t>(a.id) < names.size() ? names[static_cast<std::size_t>(a.id)]
                                                                                          : "player" + std::to_string(a.id)},
                                    {"frags", c.frags()},
                                    {"deaths", c.deaths},
                                    {"health", a.health},
                                    {"alive", a.alive}});
    }
    auto scoreboard = std::make_shared<const std::string>(json{{"scoreboard", board}}.dump());

    // One render per viewer slot; spectators watch slot 0.
    std::set<int> viewers{0};
    {
        std::lock_guard lock(impl_->mu);
        for (const auto& [slot, _] : impl_->holders) viewers.insert(slot);
    }
    const RenderOptions& o = impl_->options.render;
    auto frames = std::make_shared<std::map<int, std::vector<std::shared_ptr<const std::vector<std::uint8_t>>>>>();
    for (int v : viewers) {
        if (v >= world.player_count()) continue;
        const FrameBundle f = render_frame(world, v, o);
        const auto fmt = static_cast<std::uint8_t>(o.format);
        auto add = [&](BufferKind kind, std::uint8_t format, const std::vector<std::uint8_t>& px) {
            BridgeFrameHeader h{world.tic, static_cast<std::uint16_t>(o.width), static_cast<std::uint16_t>(o.height), kind, format};
            (*frames)[v].push_back(std::make_shared<const std::vector<std::uint8_t>>(encode_bridge_frame(h, px)));
        };
        add(BufferKind::screen, fmt, f.screen);
        if (f.depth) add(BufferKind::depth, 1, *f.depth);
        if (f.labels) add(BufferKind::labels, 1, *f.labels);
        if (f.automap) add(BufferKind::automap, fmt, *f.automap);
    }
    asio::post(impl_->io, [impl = impl_, frames, scoreboard] {
        for (const auto& s : impl->sessions) {
            if (!s->joined) continue;
            const int viewer = s->slot >= 0 ? s->slot : 0;
            const auto it = frames->find(viewer);
            if (it != frames->end())
                for (const auto& f : it->second) s->send_binary(f);
            s->send_text(*scoreboard);
        }
    });
}

}  // namespace pixelarena

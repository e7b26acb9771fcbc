#include "pixelarena/protocol.hpp"

#include "pixelarena/bytes.hpp"

namespace pixelarena {

namespace {

using Code = ProtocolError::Code;

void put_action(ByteWriter& w, const Action& a) {
    w.put(a.buttons);
    w.put(a.turn_delta);
}

Action get_action(ByteReader& r) {
    Action a;
    a.buttons = *r.get<std::uint32_t>();
    a.turn_delta = *r.get<std::int16_t>();
    return a;
}

// Structural UTF-8 check (no overlongs or surrogates).
bool valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = static_cast<unsigned char>(s[i]);
        int extra;
        std::uint32_t cp;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            extra = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= s.size()) return false;
        for (int k = 1; k <= extra; ++k) {
            const auto cc = static_cast<unsigned char>(s[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && (cp < 0x10000 || cp > 0x10FFFF)) ||
            (cp >= 0xD800 && cp <= 0xDFFF))
            return false;
        i += static_cast<std::size_t>(extra) + 1;
    }
    return true;
}

[[noreturn]] void bad_length(MsgType t, std::size_t got) {
    throw ProtocolError(Code::bad_length,
                        std::string("bad payload length ") + std::to_string(got) + " for " + to_string(t));
}

}  // namespace

MsgType type_of(const Message& m) { return static_cast<MsgType>(m.index() + 1); }

const char* to_string(MsgType t) {
    switch (t) {
        case MsgType::hello: return "HELLO";
        case MsgType::welcome: return "WELCOME";
        case MsgType::ready: return "READY";
        case MsgType::action: return "ACTION";
        case MsgType::ticbatch: return "TICBATCH";
        case MsgType::hash: return "HASH";
        case MsgType::bye: return "BYE";
    }
    return "?";
}

const char* to_string(ByeReason r) {
    switch (r) {
        case ByeReason::normal: return "normal";
        case ByeReason::full: return "session full";
        case ByeReason::version: return "protocol version mismatch";
        case ByeReason::desync: return "desync";
        case ByeReason::protocol: return "protocol error";
        case ByeReason::timeout: return "timeout";
    }
    return "?";
}

std::vector<std::uint8_t> encode(const Message& m) {
    ByteWriter p;
    std::visit(
        [&](const auto& msg) {
            using T = std::decay_t<decltype(msg)>;
            if constexpr (std::is_same_v<T, HelloMsg>) {
                p.put(msg.proto);
                p.bytes(msg.name);
            } else if constexpr (std::is_same_v<T, WelcomeMsg>) {
                p.put(msg.player_id);
                p.put(msg.seed);
                p.text(msg.config_text);
                p.bytes(msg.map_text);
            } else if constexpr (std::is_same_v<T, ReadyMsg>) {
            } else if constexpr (std::is_same_v<T, ActionMsg>) {
                p.put(msg.tic);
                put_action(p, msg.action);
            } else if constexpr (std::is_same_v<T, TicBatchMsg>) {
                if (msg.actions.size() > 255) throw ContractViolation("TICBATCH holds at most 255 actions");
                p.put(msg.tic);
                p.put(static_cast<std::uint8_t>(msg.actions.size()));
                for (const auto& a : msg.actions) put_action(p, a);
            } else if constexpr (std::is_same_v<T, HashMsg>) {
                p.put(msg.tic);
                p.put(msg.hash);
            } else if constexpr (std::is_same_v<T, ByeMsg>) {
                p.put(static_cast<std::uint8_t>(msg.reason));
            }
        },
        m);
    if (p.size() > kMaxPayload) throw ContractViolation("message payload exceeds the frame limit");
    ByteWriter f;
    f.put(static_cast<std::uint32_t>(p.size()));
    f.put(static_cast<std::uint8_t>(type_of(m)));
    f.bytes(p.data());
    return f.take();
}

Message decode_payload(std::uint8_t type, std::span<const std::uint8_t> payload) {
    if (type < 1 || type > 7) throw ProtocolError(Code::unknown_type, "unknown message type " + std::to_string(type));
    const auto t = static_cast<MsgType>(type);
    ByteReader r(payload);
    const std::size_t n = payload.size();
    switch (t) {
        case MsgType::hello: {
            if (n < 2) bad_length(t, n);
            HelloMsg m;
            m.proto = *r.get<std::uint16_t>();
            m.name = *r.bytes(r.remaining());
            if (!valid_utf8(m.name)) throw ProtocolError(Code::bad_payload, "HELLO name is not valid UTF-8");
            return m;
        }
        case MsgType::welcome: {
            if (n < 13) bad_length(t, n);
            WelcomeMsg m;
            m.player_id = *r.get<std::uint8_t>();
            m.seed = *r.get<std::uint64_t>();
            auto config = r.text();
            if (!config) throw ProtocolError(Code::bad_payload, "WELCOME config length exceeds the payload");
            m.config_text = std::move(*config);
            m.map_text = *r.bytes(r.remaining());
            if (m.player_id >= kMaxPlayers) throw ProtocolError(Code::bad_payload, "WELCOME player id out of range");
            return m;
        }
        case MsgType::ready:
            if (n != 0) bad_length(t, n);
            return ReadyMsg{};
        case MsgType::action: {
            if (n != 10) bad_length(t, n);
            ActionMsg m;
            m.tic = *r.get<std::uint32_t>();
            m.action = get_action(r);
            return m;
        }
        case MsgType::ticbatch: {
            if (n < 5) bad_length(t, n);
            TicBatchMsg m;
            m.tic = *r.get<std::uint32_t>();
            const std::uint8_t count = *r.get<std::uint8_t>();
            if (n != 5 + std::size_t{count} * 6) bad_length(t, n);
            if (count == 0 || count > kMaxPlayers) throw ProtocolError(Code::bad_payload, "TICBATCH player count out of range");
            for (int i = 0; i < count; ++i) m.actions.push_back(get_action(r));
            return m;
        }
        case MsgType::hash: {
            if (n != 12) bad_length(t, n);
            HashMsg m;
            m.tic = *r.get<std::uint32_t>();
            m.hash = *r.get<std::uint64_t>();
            return m;
        }
        case MsgType::bye: {
            if (n != 1) bad_length(t, n);
            const std::uint8_t reason = *r.get<std::uint8_t>();
            if (reason > 5) throw ProtocolError(Code::bad_payload, "unknown BYE reason " + std::to_string(reason));
            return ByeMsg{static_cast<ByeReason>(reason)};
        }
    }
    throw ProtocolError(Code::unknown_type, "unknown message type " + std::to_string(type));
}

Message decode(std::span<const std::uint8_t> frame) {
    if (frame.size() < kFrameHeaderSize) throw ProtocolError(Code::truncated, "frame shorter than its 5-byte header");
    ByteReader r(frame);
    const std::uint32_t len = *r.get<std::uint32_t>();
    const std::uint8_t type = *r.get<std::uint8_t>();
    if (len > kMaxPayload) throw ProtocolError(Code::bad_length, "payload length " + std::to_string(len) + " over limit");
    const std::size_t have = frame.size() - kFrameHeaderSize;
    if (have < len)
        throw ProtocolError(Code::truncated, "truncated frame: length " + std::to_string(len) + " but " +
                                                 std::to_string(have) + " payload bytes");
    if (have > len) throw ProtocolError(Code::bad_length, "trailing bytes after frame");
    return decode_payload(type, frame.subspan(kFrameHeaderSize));
}

void FrameDecoder::feed(std::span<const std::uint8_t> bytes) {
    if (pos_ > 0 && pos_ == buf_.size()) {
        buf_.clear();
        pos_ = 0;
    }
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<Message> FrameDecoder::next() {
    if (failed_) throw ProtocolError(Code::bad_payload, "decoder stopped after an earlier error");
    if (buffered() < kFrameHeaderSize) return std::nullopt;
    ByteReader r{std::span<const std::uint8_t>(buf_).subspan(pos_)};
    const std::uint32_t len = *r.get<std::uint32_t>();
    const std::uint8_t type = *r.get<std::uint8_t>();
    if (len > kMaxPayload) {
        failed_ = true;
        throw ProtocolError(Code::bad_length, "payload length " + std::to_string(len) + " over limit");
    }
    if (type < 1 || type > 7) {
        failed_ = true;
        throw ProtocolError(Code::unknown_type, "unknown message type " + std::to_string(type));
    }
    if (buffered() < kFrameHeaderSize + len) return std::nullopt;
    const auto payload = std::span(buf_).subspan(pos_ + kFrameHeaderSize, len);
    pos_ += kFrameHeaderSize + len;
    try {
        return decode_payload(type, payload);
    } catch (...) {
        failed_ = true;
        throw;
    }
}

}  // namespace pixelarena

#pragma once

// Little-endian encoding helpers shared by the replay format and the wire protocol.

#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace pixelarena {

class ByteWriter {
public:
    template <class T>
    void put(T value) {
        static_assert(std::is_integral_v<T>);
        using U = std::make_unsigned_t<T>;
        U u = static_cast<U>(value);
        for (std::size_t i = 0; i < sizeof(U); ++i) buf_.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
    }
    void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
    void bytes(std::span<const std::uint8_t> s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
    // u32 length followed by the bytes.
    void text(std::string_view s) {
        put(static_cast<std::uint32_t>(s.size()));
        bytes(s);
    }

    const std::vector<std::uint8_t>& data() const { return buf_; }
    std::vector<std::uint8_t> take() { return std::move(buf_); }
    std::size_t size() const { return buf_.size(); }
    void clear() { buf_.clear(); }

private:
    std::vector<std::uint8_t> buf_;
};

// Reads return nullopt when the input runs out; the position is then unchanged.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    template <class T>
    std::optional<T> get() {
        static_assert(std::is_integral_v<T>);
        using U = std::make_unsigned_t<T>;
        if (remaining() < sizeof(U)) return std::nullopt;
        U u = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) u |= static_cast<U>(static_cast<U>(data_[pos_ + i]) << (8 * i));
        pos_ += sizeof(U);
        return static_cast<T>(u);
    }
    std::optional<std::string> bytes(std::size_t n) {
        if (remaining() < n) return std::nullopt;
        std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    std::optional<std::string> text() {
        const std::size_t save = pos_;
        auto n = get<std::uint32_t>();
        if (!n) return std::nullopt;
        auto s = bytes(*n);
        if (!s) pos_ = save;
        return s;
    }

    std::size_t remaining() const { return data_.size() - pos_; }
    std::size_t position() const { return pos_; }
    void seek(std::size_t p) { pos_ = p; }

private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

}  // namespace pixelarena

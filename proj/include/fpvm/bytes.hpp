// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fpvm {

using Bytes = std::vector<uint8_t>;
using BytesView = std::span<const uint8_t>;

struct Hash32 {
    std::array<uint8_t, 32> bytes{};

    auto operator<=>(const Hash32&) const = default;
    uint8_t& operator[](size_t i) { return bytes[i]; }
    uint8_t operator[](size_t i) const { return bytes[i]; }
    const uint8_t* data() const { return bytes.data(); }
    uint8_t* data() { return bytes.data(); }
    static constexpr size_t size() { return 32; }
    bool is_zero() const {
        for (auto b : bytes)
            if (b != 0) return false;
        return true;
    }
};

struct Address {
    std::array<uint8_t, 20> bytes{};

    auto operator<=>(const Address&) const = default;
    const uint8_t* data() const { return bytes.data(); }
    uint8_t* data() { return bytes.data(); }
    static constexpr size_t size() { return 20; }
};

// All-zero digest; doubles as the empty-stack / empty-chain sentinel.
inline constexpr Hash32 ZERO_HASH{};

inline void append(Bytes& out, BytesView data) { out.insert(out.end(), data.begin(), data.end()); }
inline void append(Bytes& out, const Hash32& h) { out.insert(out.end(), h.bytes.begin(), h.bytes.end()); }
inline void append(Bytes& out, const Address& a) { out.insert(out.end(), a.bytes.begin(), a.bytes.end()); }
inline void append_u8(Bytes& out, uint8_t v) { out.push_back(v); }

inline void append_u64be(Bytes& out, uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

inline void append_u32be(Bytes& out, uint32_t v) {
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

inline uint64_t read_u64be(BytesView in) {
    uint64_t v = 0;
    for (size_t i = 0; i < 8; ++i) v = (v << 8) | in[i];
    return v;
}

inline uint32_t read_u32be(BytesView in) {
    uint32_t v = 0;
    for (size_t i = 0; i < 4; ++i) v = (v << 8) | in[i];
    return v;
}

// Hex codec: lowercase, 0x-prefixed on output; input accepts either case,
// prefix optional.
std::string to_hex(BytesView data, bool prefix = true);
std::string to_hex(const Hash32& h);
std::string to_hex(const Address& a);
Bytes from_hex(std::string_view hex);
Hash32 hash32_from_hex(std::string_view hex);
Address address_from_hex(std::string_view hex);

inline Hash32 hash32_from_bytes(BytesView in) {
    if (in.size() != 32) throw std::invalid_argument("hash32: need 32 bytes");
    Hash32 h;
    std::memcpy(h.data(), in.data(), 32);
    return h;
}

inline Address address_from_bytes(BytesView in) {
    if (in.size() != 20) throw std::invalid_argument("address: need 20 bytes");
    Address a;
    std::memcpy(a.data(), in.data(), 20);
    return a;
}

}  // namespace fpvm

template <>
struct std::hash<fpvm::Hash32> {
    size_t operator()(const fpvm::Hash32& h) const noexcept {
        size_t v;
        std::memcpy(&v, h.data(), sizeof(v));
        return v;
    }
};

template <>
struct std::hash<fpvm::Address> {
    size_t operator()(const fpvm::Address& a) const noexcept {
        size_t v;
        std::memcpy(&v, a.data(), sizeof(v));
        return v;
    }
};

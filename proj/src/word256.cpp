// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#include "fpvm/word256.hpp"

namespace fpvm {

namespace {

const Word256 kSignBit = Word256(1) << 255;

inline bool is_negative(const Word256& v) { return boost::multiprecision::bit_test(v, 255); }

inline Word256 negate(const Word256& v) { return ~v + 1; }

}  // namespace

std::array<uint8_t, 32> w256_bytes(const Word256& v) {
    std::array<uint8_t, 32> out{};
    boost::multiprecision::export_bits(v, out.rbegin(), 8, false);
    return out;
}

Word256 w256_from_bytes(BytesView bytes) {
    if (bytes.size() > 32) throw std::invalid_argument("word256: more than 32 bytes");
    Word256 v = 0;
    for (uint8_t b : bytes) v = (v << 8) | b;
    return v;
}

Word256 w256_from_hash(const Hash32& h) { return w256_from_bytes(BytesView(h.bytes)); }
Word256 w256_from_address(const Address& a) { return w256_from_bytes(BytesView(a.bytes)); }

Hash32 w256_to_hash(const Word256& v) {
    Hash32 h;
    auto b = w256_bytes(v);
    std::memcpy(h.data(), b.data(), 32);
    return h;
}

Address w256_to_address(const Word256& v) {
    Address a;
    auto b = w256_bytes(v);
    std::memcpy(a.data(), b.data() + 12, 20);
    return a;
}

unsigned w256_byte_length(const Word256& v) {
    if (v == 0) return 0;
    return (boost::multiprecision::msb(v) / 8) + 1;
}

uint64_t w256_to_u64_saturated(const Word256& v) {
    if (!w256_fits_u64(v)) return UINT64_MAX;
    return static_cast<uint64_t>(v);
}

Word256 w256_div(const Word256& a, const Word256& b) { return b == 0 ? Word256(0) : Word256(a / b); }
Word256 w256_mod(const Word256& a, const Word256& b) { return b == 0 ? Word256(0) : Word256(a % b); }

Word256 w256_sdiv(const Word256& a, const Word256& b) {
    if (b == 0) return 0;
    // -2^255 / -1 overflows; the EVM defines the result as -2^255.
    if (a == kSignBit && b == ~Word256(0)) return kSignBit;
    bool neg_a = is_negative(a), neg_b = is_negative(b);
    Word256 q = (neg_a ? negate(a) : a) / (neg_b ? negate(b) : b);
    return neg_a != neg_b ? negate(q) : q;
}

Word256 w256_smod(const Word256& a, const Word256& b) {
    if (b == 0) return 0;
    bool neg_a = is_negative(a);
    Word256 r = (neg_a ? negate(a) : a) % (is_negative(b) ? negate(b) : b);
    return neg_a ? negate(r) : r;
}

Word256 w256_addmod(const Word256& a, const Word256& b, const Word256& n) {
    if (n == 0) return 0;
    Word512 s = Word512(a) + Word512(b);
    return Word256(s % Word512(n));
}

Word256 w256_mulmod(const Word256& a, const Word256& b, const Word256& n) {
    if (n == 0) return 0;
    Word512 p = Word512(a) * Word512(b);
    return Word256(p % Word512(n));
}

Word256 w256_exp(Word256 base, Word256 exponent) {
    Word256 result = 1;
    while (exponent != 0) {
        if (boost::multiprecision::bit_test(exponent, 0)) result *= base;
        base *= base;
        exponent >>= 1;
    }
    return result;
}

Word256 w256_signextend(const Word256& byte_index, const Word256& value) {
    if (byte_index >= 31) return value;
    unsigned bit = static_cast<unsigned>(byte_index) * 8 + 7;
    Word256 mask = (Word256(1) << (bit + 1)) - 1;
    if (boost::multiprecision::bit_test(value, bit)) return value | ~mask;
    return value & mask;
}

bool w256_slt(const Word256& a, const Word256& b) {
    bool neg_a = is_negative(a), neg_b = is_negative(b);
    if (neg_a != neg_b) return neg_a;
    return a < b;
}

Word256 w256_shl(const Word256& shift, const Word256& value) {
    if (shift >= 256) return 0;
    return value << static_cast<unsigned>(shift);
}

Word256 w256_shr(const Word256& shift, const Word256& value) {
    if (shift >= 256) return 0;
    return value >> static_cast<unsigned>(shift);
}

Word256 w256_sar(const Word256& shift, const Word256& value) {
    bool neg = is_negative(value);
    if (shift >= 256) return neg ? ~Word256(0) : Word256(0);
    unsigned s = static_cast<unsigned>(shift);
    Word256 r = value >> s;
    if (neg && s > 0) r |= ~(~Word256(0) >> s);
    return r;
}

Word256 w256_byte(const Word256& index, const Word256& value) {
    if (index >= 32) return 0;
    unsigned i = static_cast<unsigned>(index);
    return (value >> (8 * (31 - i))) & 0xff;
}

}  // namespace fpvm

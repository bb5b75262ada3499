// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "fpvm/bytes.hpp"

namespace fpvm {

// 256-bit machine word. Unsigned, wrapping modulo 2^256; the canonical
// serialized form is 32 bytes big-endian.
using Word256 = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<
    256, 256, boost::multiprecision::unsigned_magnitude, boost::multiprecision::unchecked, void>>;

using Word512 = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<
    512, 512, boost::multiprecision::unsigned_magnitude, boost::multiprecision::unchecked, void>>;

std::array<uint8_t, 32> w256_bytes(const Word256& v);
Word256 w256_from_bytes(BytesView bytes);  // up to 32 bytes, big-endian
Word256 w256_from_hash(const Hash32& h);
Word256 w256_from_address(const Address& a);
Hash32 w256_to_hash(const Word256& v);
Address w256_to_address(const Word256& v);  // low 20 bytes

inline bool w256_bit(const Word256& v, unsigned bit) { return boost::multiprecision::bit_test(v, bit); }

// Number of significant bytes in the big-endian representation (0 for zero).
unsigned w256_byte_length(const Word256& v);

// Saturating narrowing to uint64; values above 2^64-1 clamp. Used for
// memory offsets and gas operands where anything that large is out of gas
// long before it is addressable.
uint64_t w256_to_u64_saturated(const Word256& v);
inline bool w256_fits_u64(const Word256& v) { return v >> 64 == 0; }

// EVM arithmetic helpers. All wrap modulo 2^256; division by zero yields 0.
Word256 w256_div(const Word256& a, const Word256& b);
Word256 w256_mod(const Word256& a, const Word256& b);
Word256 w256_sdiv(const Word256& a, const Word256& b);
Word256 w256_smod(const Word256& a, const Word256& b);
Word256 w256_addmod(const Word256& a, const Word256& b, const Word256& n);
Word256 w256_mulmod(const Word256& a, const Word256& b, const Word256& n);
Word256 w256_exp(Word256 base, Word256 exponent);
Word256 w256_signextend(const Word256& byte_index, const Word256& value);
bool w256_slt(const Word256& a, const Word256& b);
Word256 w256_shl(const Word256& shift, const Word256& value);
Word256 w256_shr(const Word256& shift, const Word256& value);
Word256 w256_sar(const Word256& shift, const Word256& value);
Word256 w256_byte(const Word256& index, const Word256& value);

}  // namespace fpvm

// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#include "fpvm/keccak.hpp"

namespace fpvm {

namespace {

constexpr uint64_t kRoundConstants[24] = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL, 0x8000000080008000ULL,
    0x000000000000808bULL, 0x0000000080000001ULL, 0x8000000080008081ULL, 0x8000000000008009ULL,
    0x000000000000008aULL, 0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL, 0x8000000000008003ULL,
    0x8000000000008002ULL, 0x8000000000000080ULL, 0x000000000000800aULL, 0x800000008000000aULL,
    0x8000000080008081ULL, 0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
};

// Rotation offsets and the pi lane permutation, flattened to the x + 5y layout.
constexpr int kRho[24] = {1,  3,  6,  10, 15, 21, 28, 36, 45, 55, 2,  14,
                          27, 41, 56, 8,  25, 43, 62, 18, 39, 61, 20, 44};
constexpr int kPi[24] = {10, 7,  11, 17, 18, 3, 5,  16, 8,  21, 24, 4,
                         15, 23, 19, 13, 12, 2, 20, 14, 22, 9,  6,  1};

inline uint64_t rotl64(uint64_t v, int n) { return (v << n) | (v >> (64 - n)); }

uint64_t g_invocations = 0;

void keccakf1600(uint64_t st[25]) {
    ++g_invocations;
    for (int round = 0; round < 24; ++round) {
        // theta
        uint64_t bc[5];
        for (int i = 0; i < 5; ++i)
            bc[i] = st[i] ^ st[i + 5] ^ st[i + 10] ^ st[i + 15] ^ st[i + 20];
        for (int i = 0; i < 5; ++i) {
            uint64_t t = bc[(i + 4) % 5] ^ rotl64(bc[(i + 1) % 5], 1);
            for (int j = 0; j < 25; j += 5) st[j + i] ^= t;
        }
        // rho + pi
        uint64_t t = st[1];
        for (int i = 0; i < 24; ++i) {
            int j = kPi[i];
            uint64_t tmp = st[j];
            st[j] = rotl64(t, kRho[i]);
            t = tmp;
        }
        // chi
        for (int j = 0; j < 25; j += 5) {
            for (int i = 0; i < 5; ++i) bc[i] = st[j + i];
            for (int i = 0; i < 5; ++i) st[j + i] = bc[i] ^ (~bc[(i + 1) % 5] & bc[(i + 2) % 5]);
        }
        // iota
        st[0] ^= kRoundConstants[round];
    }
}

constexpr size_t kRate = 136;  // 1600/8 - 2*256/8

inline void absorb_block(uint64_t st[25], const uint8_t* block) {
    for (size_t i = 0; i < kRate / 8; ++i) {
        uint64_t lane;
        std::memcpy(&lane, block + 8 * i, 8);  // little-endian hosts only
        st[i] ^= lane;
    }
    keccakf1600(st);
}

}  // namespace

uint64_t keccak_invocations() { return g_invocations; }

Keccak256& Keccak256::update(BytesView data) {
    const uint8_t* p = data.data();
    size_t n = data.size();
    if (buf_len_ > 0) {
        size_t take = std::min(n, kRate - buf_len_);
        std::memcpy(buf_ + buf_len_, p, take);
        buf_len_ += take;
        p += take;
        n -= take;
        if (buf_len_ == kRate) {
            absorb_block(state_, buf_);
            buf_len_ = 0;
        }
    }
    while (n >= kRate) {
        absorb_block(state_, p);
        p += kRate;
        n -= kRate;
    }
    if (n > 0) {
        std::memcpy(buf_, p, n);
        buf_len_ = n;
    }
    return *this;
}

Keccak256& Keccak256::update_u64be(uint64_t v) {
    uint8_t tmp[8];
    for (int i = 0; i < 8; ++i) tmp[i] = static_cast<uint8_t>(v >> (8 * (7 - i)));
    return update(BytesView(tmp, 8));
}

Keccak256& Keccak256::update_u8(uint8_t v) { return update(BytesView(&v, 1)); }

Hash32 Keccak256::final() {
    std::memset(buf_ + buf_len_, 0, kRate - buf_len_);
    buf_[buf_len_] ^= 0x01;  // original Keccak domain padding
    buf_[kRate - 1] ^= 0x80;
    absorb_block(state_, buf_);
    Hash32 out;
    std::memcpy(out.data(), state_, 32);
    // Reset so a hasher object cannot be finalized twice by accident.
    std::memset(state_, 0, sizeof(state_));
    buf_len_ = 0;
    return out;
}

Hash32 keccak256(BytesView data) {
    Keccak256 h;
    h.update(data);
    return h.final();
}

const Hash32 EMPTY_KECCAK = keccak256(BytesView{});
const Hash32 EMPTY_TRIE_ROOT = [] {
    uint8_t rlp_empty_string = 0x80;
    return keccak256(BytesView(&rlp_empty_string, 1));
}();

}  // namespace fpvm

// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

// Test-only Keccak-256 written straight off the sponge definition, kept
// deliberately different in structure from the production implementation:
// 5x5 lane matrix, rotation offsets computed on the fly, byte-level absorb.

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fpvm/bytes.hpp"

namespace fpvm::test {

inline Hash32 keccak256_oracle(BytesView input) {
    auto rot = [](uint64_t x, unsigned n) { return n == 0 ? x : (x << n) | (x >> (64 - n)); };

    uint64_t rc[24];
    {
        // LFSR-generated round constants per the Keccak reference.
        uint8_t lfsr = 1;
        for (int round = 0; round < 24; ++round) {
            uint64_t c = 0;
            for (int j = 0; j < 7; ++j) {
                unsigned bitpos = (1u << j) - 1;
                if (lfsr & 1) c |= uint64_t(1) << bitpos;
                bool high = lfsr & 0x80;
                lfsr = static_cast<uint8_t>(lfsr << 1);
                if (high) lfsr ^= 0x71;
            }
            rc[round] = c;
        }
    }

    uint64_t a[5][5] = {};
    auto permute = [&]() {
        // Rotation offsets from the pi-spiral walk.
        unsigned offs[5][5] = {};
        {
            unsigned x = 1, y = 0;
            for (unsigned t = 0; t < 24; ++t) {
                offs[x][y] = ((t + 1) * (t + 2) / 2) % 64;
                unsigned nx = y, ny = (2 * x + 3 * y) % 5;
                x = nx;
                y = ny;
            }
        }
        for (int round = 0; round < 24; ++round) {
            uint64_t c[5], d[5];
            for (int x = 0; x < 5; ++x)
                c[x] = a[x][0] ^ a[x][1] ^ a[x][2] ^ a[x][3] ^ a[x][4];
            for (int x = 0; x < 5; ++x) {
                d[x] = c[(x + 4) % 5] ^ rot(c[(x + 1) % 5], 1);
                for (int y = 0; y < 5; ++y) a[x][y] ^= d[x];
            }
            uint64_t b[5][5];
            for (int x = 0; x < 5; ++x)
                for (int y = 0; y < 5; ++y) b[y][(2 * x + 3 * y) % 5] = rot(a[x][y], offs[x][y]);
            for (int x = 0; x < 5; ++x)
                for (int y = 0; y < 5; ++y)
                    a[x][y] = b[x][y] ^ (~b[(x + 1) % 5][y] & b[(x + 2) % 5][y]);
            a[0][0] ^= rc[round];
        }
    };

    constexpr size_t rate = 136;
    std::vector<uint8_t> padded(input.begin(), input.end());
    padded.push_back(0x01);
    while (padded.size() % rate != 0) padded.push_back(0x00);
    padded.back() ^= 0x80;

    for (size_t block = 0; block < padded.size(); block += rate) {
        for (size_t i = 0; i < rate; ++i) {
            size_t lane = i / 8;
            a[lane % 5][lane / 5] ^= uint64_t(padded[block + i]) << (8 * (i % 8));
        }
        permute();
    }

    Hash32 out;
    for (int i = 0; i < 32; ++i) {
        size_t lane = i / 8;
        out[i] = static_cast<uint8_t>(a[lane % 5][lane / 5] >> (8 * (i % 8)));
    }
    return out;
}

}  // namespace fpvm::test

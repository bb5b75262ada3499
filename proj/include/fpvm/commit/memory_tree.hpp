// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <optional>

#include "fpvm/keccak.hpp"

namespace fpvm {

// Merkle commitment over a byte array viewed as 32-byte cells.
//
// Leaf i of an array holding n cells is keccak256(offset || cell) where
// offset is the 32-byte big-endian byte offset 32*i and cell is the
// zero-padded 32-byte word. The tree is a perfect binary tree padded to the
// next power of two; padding leaves (index >= n) are the zero hash. The
// root of zero-length data is the zero-hash sentinel, which never enters a
// state hash (the size-0 omission rule lives in the OSS layer).

Hash32 memory_leaf_hash(uint64_t byte_offset, BytesView cell32);
Hash32 memory_root(BytesView data);

inline uint64_t memory_leaf_count(uint64_t byte_len) { return (byte_len + 31) / 32; }
uint64_t memory_tree_width(uint64_t byte_len);  // next pow2 of leaf count, min 1

// Hash of an all-padding subtree with 2^level leaves.
Hash32 zero_subtree(unsigned level);

// Witness for one contiguous span of a committed byte array, usable for
// reads, overwrites and appends. `old_cells` holds the pre-state content of
// every revealed leaf that exists in the old array; `siblings` holds the
// untouched subtree hashes in schedule order; `schedule` records, per merge
// step, whether the off-path node came from `siblings` (the reconstruction
// order is derivable from the indices, and verification cross-checks it).
struct MemSpanProof {
    uint64_t old_len = 0;
    uint64_t new_len = 0;
    std::vector<std::array<uint8_t, 32>> old_cells;
    std::vector<Hash32> siblings;
    std::vector<bool> schedule;

    bool operator==(const MemSpanProof&) const = default;
};

// Prover side; needs the full pre-state bytes. For reads pass
// new_len == data.size().
MemSpanProof mem_prove_span(BytesView data, uint64_t offset, uint64_t length, uint64_t new_len);

// Verifies the span content against `root` and returns the bytes at
// [offset, offset+length), zero-extended past old_len. Rejects proofs whose
// recomputed root disagrees.
std::optional<Bytes> mem_verify_read(const Hash32& root, uint64_t offset, uint64_t length,
                                     const MemSpanProof& proof);

// Verifies the old content against `root`, splices `content` at `offset`,
// grows the array to proof.new_len and returns the post-state root.
std::optional<Hash32> mem_apply_write(const Hash32& root, uint64_t offset, BytesView content,
                                      const MemSpanProof& proof);

}  // namespace fpvm

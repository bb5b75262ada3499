// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <memory>
#include <optional>

#include "fpvm/keccak.hpp"

namespace fpvm {

// Fixed 256-leaf Merkle tree of recent block hashes. The hash of block i
// lives at leaf i % 256; unset leaves hold the zero hash. Leaves are the raw
// 32-byte block hashes; interior nodes are keccak256(left || right).
class BlockHashTree {
public:
    static constexpr size_t kLeaves = 256;
    static constexpr size_t kDepth = 8;

    BlockHashTree();

    const Hash32& root() const { return root_; }
    const Hash32& leaf(size_t index) const { return (*leaves_)[index]; }

    // Returns a new tree with the hash of `block_number` installed at its
    // leaf. Value semantics: the receiver is unchanged.
    BlockHashTree with_block(uint64_t block_number, const Hash32& hash) const;

    // Sibling path (depth 8, leaf level first) for the given leaf.
    std::vector<Hash32> prove(size_t leaf_index) const;

    // Root implied by (leaf_index, leaf_value, path).
    static Hash32 root_from_path(size_t leaf_index, const Hash32& leaf,
                                 std::span<const Hash32> path);

private:
    std::shared_ptr<const std::array<Hash32, kLeaves>> leaves_;
    Hash32 root_;

    static Hash32 compute_root(const std::array<Hash32, kLeaves>& leaves);
};

// One leaf update expressed as a verifiable statement: the path authenticates
// old_leaf under old_root, and the same path with new_leaf yields new_root.
struct BlockHashUpdateProof {
    uint64_t block_number = 0;
    Hash32 old_leaf;
    std::vector<Hash32> path;

    bool operator==(const BlockHashUpdateProof&) const = default;
};

}  // namespace fpvm

// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#include "fpvm/commit/block_hash_tree.hpp"

namespace fpvm {

namespace {

Hash32 hash_pair(const Hash32& left, const Hash32& right) {
    return Keccak256().update(left).update(right).final();
}

}  // namespace

BlockHashTree::BlockHashTree() {
    leaves_ = std::make_shared<std::array<Hash32, kLeaves>>();
    root_ = compute_root(*leaves_);
}

Hash32 BlockHashTree::compute_root(const std::array<Hash32, kLeaves>& leaves) {
    std::vector<Hash32> level(leaves.begin(), leaves.end());
    while (level.size() > 1) {
        std::vector<Hash32> next;
        next.reserve(level.size() / 2);
        for (size_t i = 0; i < level.size(); i += 2) next.push_back(hash_pair(level[i], level[i + 1]));
        level = std::move(next);
    }
    return level[0];
}

BlockHashTree BlockHashTree::with_block(uint64_t block_number, const Hash32& hash) const {
    BlockHashTree out;
    auto leaves = std::make_shared<std::array<Hash32, kLeaves>>(*leaves_);
    (*leaves)[block_number % kLeaves] = hash;
    out.leaves_ = leaves;
    out.root_ = compute_root(*leaves);
    return out;
}

std::vector<Hash32> BlockHashTree::prove(size_t leaf_index) const {
    std::vector<Hash32> path;
    path.reserve(kDepth);
    std::vector<Hash32> level(leaves_->begin(), leaves_->end());
    size_t idx = leaf_index;
    while (level.size() > 1) {
        path.push_back(level[idx ^ 1]);
        std::vector<Hash32> next;
        next.reserve(level.size() / 2);
        for (size_t i = 0; i < level.size(); i += 2) next.push_back(hash_pair(level[i], level[i + 1]));
        level = std::move(next);
        idx >>= 1;
    }
    return path;
}

Hash32 BlockHashTree::root_from_path(size_t leaf_index, const Hash32& leaf,
                                     std::span<const Hash32> path) {
    Hash32 acc = leaf;
    size_t idx = leaf_index;
    for (const Hash32& sibling : path) {
        acc = (idx & 1) ? hash_pair(sibling, acc) : hash_pair(acc, sibling);
        idx >>= 1;
    }
    return acc;
}

}  // namespace fpvm

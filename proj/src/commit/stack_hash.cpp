// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#include "fpvm/commit/stack_hash.hpp"

namespace fpvm {

Hash32 stack_hash(std::span<const Word256> elements) {
    Hash32 h = ZERO_HASH;
    for (const Word256& e : elements) h = stack_hash_push(h, e);
    return h;
}

std::optional<StackProof> stack_proof_build(std::span<const Word256> stack, size_t delta) {
    if (delta > stack.size()) return std::nullopt;
    StackProof proof;
    proof.h = stack_hash(stack);
    proof.h0 = stack_hash(stack.first(stack.size() - delta));
    proof.popped.reserve(delta);
    for (size_t i = 0; i < delta; ++i) proof.popped.push_back(stack[stack.size() - 1 - i]);
    return proof;
}

std::optional<Hash32> stack_proof_apply(const Hash32& h, const Hash32& h0,
                                        std::span<const Word256> popped,
                                        std::span<const Word256> pushed) {
    // popped is in pop order, so the chain folds it back last-popped first.
    Hash32 acc = h0;
    for (size_t i = popped.size(); i > 0; --i) acc = stack_hash_push(acc, popped[i - 1]);
    if (acc != h) return std::nullopt;
    acc = h0;
    for (const Word256& e : pushed) acc = stack_hash_push(acc, e);
    return acc;
}

}  // namespace fpvm

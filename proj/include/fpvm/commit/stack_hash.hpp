// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <optional>

#include "fpvm/keccak.hpp"
#include "fpvm/word256.hpp"

namespace fpvm {

// Hash-chain commitment over a stack, folded bottom to top:
//   H([]) = zero hash; H(s || x) = keccak256(H(s) || x).
struct StackCommitment {
    Hash32 hash = ZERO_HASH;
    uint64_t size = 0;

    bool operator==(const StackCommitment&) const = default;
};

Hash32 stack_hash(std::span<const Word256> elements);
inline Hash32 stack_hash_push(const Hash32& below, const Word256& top) {
    return Keccak256().update(below).update(BytesView(w256_bytes(top))).final();
}

// Witness for the delta-pop / alpha-push transition of one instruction.
// `popped` holds the removed elements in pop order (top of stack first);
// h0 is the chain head after the pops.
struct StackProof {
    Hash32 h;
    Hash32 h0;
    std::vector<Word256> popped;

    bool operator==(const StackProof&) const = default;
};

// Builds the witness for removing the top `delta` elements. Fails when the
// stack is shallower than delta, which signals a malformed prover request.
std::optional<StackProof> stack_proof_build(std::span<const Word256> stack, size_t delta);

// Recomputes h from (h0, popped); on mismatch returns nullopt (the revealed
// elements are not the committed stack top). Otherwise folds `pushed` onto
// h0 and returns the post-transition chain head.
std::optional<Hash32> stack_proof_apply(const Hash32& h, const Hash32& h0,
                                        std::span<const Word256> popped,
                                        std::span<const Word256> pushed);

}  // namespace fpvm

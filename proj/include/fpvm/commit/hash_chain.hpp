// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include "fpvm/keccak.hpp"

namespace fpvm {

// Order-sensitive accumulator: head' = keccak256(head || item).
// The empty chain head is the zero hash.
struct HashChain {
    Hash32 head = ZERO_HASH;
    uint64_t length = 0;

    bool operator==(const HashChain&) const = default;

    void append(BytesView item) {
        head = hashchain_append(head, item);
        ++length;
    }

    static Hash32 hashchain_append(const Hash32& head, BytesView item) {
        return Keccak256().update(head).update(item).final();
    }
};

inline Hash32 hashchain_append(const Hash32& head, BytesView item) {
    return HashChain::hashchain_append(head, item);
}

}  // namespace fpvm

// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include "fpvm/bytes.hpp"

namespace fpvm {

// Keccak-256 with the original 0x01 domain padding (the Ethereum variant,
// not the finalized SHA3-256 standard).
Hash32 keccak256(BytesView data);

inline Hash32 keccak256(const Bytes& data) { return keccak256(BytesView(data)); }

// Streaming interface for multi-part preimages.
class Keccak256 {
public:
    Keccak256() = default;
    Keccak256& update(BytesView data);
    Keccak256& update(const Hash32& h) { return update(BytesView(h.bytes)); }
    Keccak256& update(const Address& a) { return update(BytesView(a.bytes)); }
    Keccak256& update_u64be(uint64_t v);
    Keccak256& update_u8(uint8_t v);
    Hash32 final();

private:
    uint64_t state_[25]{};
    uint8_t buf_[136]{};
    size_t buf_len_ = 0;
};

// keccak256 of the empty byte string: the code hash of code-less accounts.
extern const Hash32 EMPTY_KECCAK;

// keccak256 of rlp("") = keccak256(0x80): the root of an empty trie.
extern const Hash32 EMPTY_TRIE_ROOT;

// Monotone counter of permutation invocations, used by the verifier's work
// meter and by scale tests. Not synchronized; executions are single-threaded.
uint64_t keccak_invocations();

}  // namespace fpvm

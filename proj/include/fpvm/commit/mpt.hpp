// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <map>
#include <memory>
#include <optional>

#include "fpvm/keccak.hpp"
#include "fpvm/rlp.hpp"

namespace fpvm {

// Merkle Patricia trie in the Ethereum convention: branch/extension/leaf
// nodes, hex-prefix path encoding, nodes referenced by keccak256 of their
// RLP when it is 32 bytes or longer and embedded in the parent otherwise.
// The root is always referenced by hash; the empty trie root is
// keccak256(rlp("")).

class MptNodeSource {
public:
    virtual ~MptNodeSource() = default;
    virtual std::optional<Bytes> get(const Hash32& hash) const = 0;
};

// Append-only content-addressed node store. Old roots stay resolvable after
// updates, which is what gives tries their cheap value-semantics snapshots.
class MptStore : public MptNodeSource {
public:
    std::optional<Bytes> get(const Hash32& hash) const override;
    Hash32 put(Bytes node_rlp);

private:
    std::map<Hash32, Bytes> nodes_;
};

// Resolves from a proof's node bag; records nothing.
class MptProofBag : public MptNodeSource {
public:
    explicit MptProofBag(std::span<const Bytes> nodes);
    std::optional<Bytes> get(const Hash32& hash) const override;

private:
    std::map<Hash32, Bytes> nodes_;
};

// Ordered list of the hash-referenced nodes resolved along a key's path,
// root first. Doubles as the write witness: for deletions it additionally
// carries the sibling pulled in by a branch collapse.
struct MptProof {
    std::vector<Bytes> nodes;

    bool operator==(const MptProof&) const = default;
};

// Core operations. `source` must resolve every hash reference reached; a
// miss or an undecodable node raises MptError, which the proof-facing
// wrappers translate into a verification failure.
struct MptError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::optional<Bytes> mpt_get(const MptNodeSource& source, const Hash32& root, BytesView key);
Hash32 mpt_update(const MptNodeSource& source, MptStore& sink, const Hash32& root, BytesView key,
                  std::optional<BytesView> value);

// Proof construction against a fully resolvable trie.
MptProof mpt_prove(const MptNodeSource& source, const Hash32& root, BytesView key);
MptProof mpt_prove_for_write(const MptNodeSource& source, const Hash32& root, BytesView key,
                             std::optional<BytesView> value);

// Stateless verification. Outer nullopt: the proof does not authenticate
// against the root. Inner optional: the key's value, or absent.
std::optional<std::optional<Bytes>> mpt_verify_read(const Hash32& root, BytesView key,
                                                    const MptProof& proof);
// Recomputes the post-write root using only proof nodes.
std::optional<Hash32> mpt_apply_write(const Hash32& root, BytesView key,
                                      std::optional<BytesView> value, const MptProof& proof);

// Value-semantics handle used by the interpreter: a shared append-only store
// plus a root. Updates return a new handle; existing handles stay valid.
class Mpt {
public:
    Mpt() : store_(std::make_shared<MptStore>()), root_(EMPTY_TRIE_ROOT) {}
    Mpt(std::shared_ptr<MptStore> store, const Hash32& root)
        : store_(std::move(store)), root_(root) {}

    const Hash32& root() const { return root_; }
    const std::shared_ptr<MptStore>& store() const { return store_; }
    bool empty() const { return root_ == EMPTY_TRIE_ROOT; }

    std::optional<Bytes> get(BytesView key) const { return mpt_get(*store_, root_, key); }
    Mpt update(BytesView key, std::optional<BytesView> value) const {
        Hash32 new_root = mpt_update(*store_, *store_, root_, key, value);
        return Mpt(store_, new_root);
    }
    MptProof prove(BytesView key) const { return mpt_prove(*store_, root_, key); }
    MptProof prove_for_write(BytesView key, std::optional<BytesView> value) const {
        return mpt_prove_for_write(*store_, root_, key, value);
    }

private:
    std::shared_ptr<MptStore> store_;
    Hash32 root_;
};

}  // namespace fpvm

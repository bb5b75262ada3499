// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <functional>
#include <set>

#include "fpvm/commit/block_hash_tree.hpp"
#include "fpvm/commit/hash_chain.hpp"
#include "fpvm/evm/gas.hpp"
#include "fpvm/evm/world.hpp"
#include "fpvm/oss/state.hpp"

namespace fpvm::evm {

// Per-transaction context shared by every step record of that transaction.
struct TxContext {
    Transaction tx;
    BlockContext block_ctx;
    oss::InterState prior_inter;       // the inter-transaction state before
    Hash32 prior_inter_hash;
    Hash32 committed_world_root;       // == prior_inter.world_root
    Mpt tx_trie;                       // trie handles as of transaction start
    Mpt receipt_trie;
};

// Everything the prover needs to open commitments at one boundary. Only
// populated when a listener captures the execution (that is, on dispute
// re-execution); normal runs never build these.
struct StepDeep {
    std::shared_ptr<const TxContext> tx_ctx;

    // Intra-state payload.
    std::vector<Word256> stack;
    Bytes memory;
    std::shared_ptr<const Bytes> input;
    Bytes return_data;
    std::shared_ptr<const Bytes> code;
    std::shared_ptr<MptStore> world_store;
    std::shared_ptr<const std::map<Hash32, Bytes>> codes;
    Mpt access_trie;
    BlockHashTree block_tree;
    std::shared_ptr<const oss::IntraState> caller_view;
    std::shared_ptr<const Bytes> caller_memory;
    std::vector<Address> self_destructs;

    // Boundary payload for inter/block records.
    BlockContext block_ctx;
    Mpt tx_trie;
    Mpt receipt_trie;
    Receipt receipt;  // receipt of the completed transaction (inter records)
};

struct StepRecord {
    oss::OneStepState state;
    Hash32 hash;
    std::shared_ptr<const StepDeep> deep;
};

class StepListener {
public:
    virtual ~StepListener() = default;
    virtual void on_state(StepRecord record) = 0;
};

struct TxResult {
    bool skipped = false;   // failed validity checks; no state change
    Receipt receipt;
    uint64_t gas_used = 0;
    Bytes return_data;      // top-level frame output (empty for creations)
};

struct BlockResult {
    Hash32 world_root;
    Hash32 tx_trie_root;
    Hash32 receipt_trie_root;
    Hash32 block_hash;
    uint64_t gas_used = 0;
    oss::BlockState end_state;
    std::vector<TxResult> tx_results;
};

// The block header preimage: everything a verifier needs to recompute the
// block hash from sequenced context plus committed roots.
Bytes encode_block_header(const BlockContext& ctx, uint64_t gas_used, const Hash32& world_root,
                          const Hash32& tx_root, const Hash32& receipt_root);

// Sequential executor over a chain of blocks. Owns the world state, the
// block-hash tree and the running block state commitment.
class Chain {
public:
    Chain(WorldState genesis, GasSchedule schedule);

    const oss::BlockState& tip() const { return tip_; }
    Hash32 tip_hash() const { return oss::oss_hash(tip_); }
    const WorldState& world() const { return world_; }
    const BlockHashTree& block_tree() const { return tree_; }
    const GasSchedule& schedule() const { return schedule_; }

    // Executes one block. ctx.number must be tip().block_number + 1, and the
    // included transactions must fit the block gas limit. When `listener` is
    // set, every one-step state (including the starting block state) is
    // reported in order.
    BlockResult execute_block(const BlockContext& ctx, const std::vector<Transaction>& txs,
                              StepListener* listener = nullptr);

    // Validity rule used both for execution-time skipping and sequencing.
    bool transaction_valid(const Transaction& tx) const;

private:
    WorldState world_;
    BlockHashTree tree_;
    GasSchedule schedule_;
    oss::BlockState tip_;
};

// Collects only the state hashes; what a validator keeps for sectioning.
class HashStreamCollector : public StepListener {
public:
    void on_state(StepRecord record) override {
        if (!hashes_.empty() && record.hash == hashes_.back()) return;  // block seam
        hashes_.push_back(record.hash);
    }
    const std::vector<Hash32>& hashes() const { return hashes_; }

private:
    std::vector<Hash32> hashes_;
};

// Keeps full records; used by tests and by proof generation at desk scale.
class RecordCollector : public StepListener {
public:
    void on_state(StepRecord record) override {
        if (!records_.empty() && record.hash == records_.back().hash &&
            std::holds_alternative<oss::BlockState>(record.state))
            return;
        records_.push_back(std::move(record));
    }
    const std::vector<StepRecord>& records() const { return records_; }
    std::vector<StepRecord>& records() { return records_; }

private:
    std::vector<StepRecord> records_;
};

// Streams adjacent pairs to a callback and retains nothing.
class PairStreamListener : public StepListener {
public:
    using Fn = std::function<void(const StepRecord& pre, const StepRecord& post)>;
    explicit PairStreamListener(Fn fn) : fn_(std::move(fn)) {}
    void on_state(StepRecord record) override {
        if (prev_ && record.hash == prev_->hash &&
            std::holds_alternative<oss::BlockState>(record.state))
            return;
        if (prev_) fn_(*prev_, record);
        prev_ = std::move(record);
    }

private:
    Fn fn_;
    std::optional<StepRecord> prev_;
};

}  // namespace fpvm::evm

// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <variant>

#include "fpvm/commit/stack_hash.hpp"
#include "fpvm/word256.hpp"

namespace fpvm::oss {

// One-step states: the commitment view of the machine between two adjacent
// execution steps. Scalars are hashed as fixed-width big-endian (8 bytes for
// counts and offsets, 1 byte for flags), addresses as 20 bytes, words and
// roots as 32.

// State between two instructions of one transaction.
struct IntraState {
    uint64_t block_number = 0;
    uint64_t tx_index = 0;
    uint64_t depth = 1;           // 1 = directly invoked by the transaction
    uint64_t gas = 0;
    uint64_t refund = 0;
    Hash32 last_depth_hash;       // caller's state hash; world root of the
                                  // checkpoint state at depth 1
    Address contract;             // these six (plus writable) are omitted
    Address caller;               //   from the hash at depth 1
    Word256 value = 0;
    uint8_t call_flag = 0;        // 0 CALL, 1 CALLCODE, 2 DELEGATECALL,
                                  // 3 STATICCALL, 4 CREATE, 5 CREATE2
    bool writable = true;
    uint64_t out_offset = 0;
    uint64_t out_size = 0;
    Hash32 code_hash;
    uint64_t pc = 0;
    uint8_t opcode = 0;
    StackCommitment stack;
    uint64_t memory_size = 0;     // bytes; root omitted from the hash when 0
    Hash32 memory_root;
    uint64_t input_size = 0;
    Hash32 input_root;
    uint64_t return_size = 0;
    Hash32 return_root;
    Hash32 world_root;
    Hash32 committed_world_root;  // world root at transaction start
    Hash32 self_destruct_head;
    Hash32 access_list_root;
    Hash32 log_head;
    Hash32 block_hash_tree_root;

    bool operator==(const IntraState&) const = default;
};

// State between two transactions of one block.
struct InterState {
    uint64_t block_number = 0;
    uint64_t tx_index = 0;        // transactions completed so far
    Hash32 world_root;
    uint64_t cumulative_gas = 0;  // gas used within the current block
    uint64_t block_gas_used = 0;  // gas used by all previous blocks
    Hash32 block_hash_tree_root;
    Hash32 tx_trie_root;
    Hash32 receipt_trie_root;

    bool operator==(const InterState&) const = default;
};

// State of a finalized block.
struct BlockState {
    uint64_t block_number = 0;
    Hash32 world_root;
    uint64_t cumulative_gas = 0;  // this block plus all ancestors
    Hash32 block_hash_tree_root;

    bool operator==(const BlockState&) const = default;
};

using OneStepState = std::variant<IntraState, InterState, BlockState>;

Hash32 oss_hash(const IntraState& s);
Hash32 oss_hash(const InterState& s);
Hash32 oss_hash(const BlockState& s);
Hash32 oss_hash(const OneStepState& s);

enum class StepKind : uint8_t {
    Instruction = 0,
    TxInit = 1,
    TxFinalize = 2,
    BlockInit = 3,
    BlockFinalize = 4,
    RegularTx = 5,
};

std::string_view step_kind_name(StepKind kind);

// Classifies the transition between two adjacent states of a boundary
// stream; nullopt when the pair cannot be adjacent in any valid stream.
std::optional<StepKind> classify_transition(const OneStepState& from, const OneStepState& to);

// Construction counters. Normal execution must never build intra or inter
// states; the harness asserts this through these counters.
struct CaptureCounters {
    uint64_t intra = 0;
    uint64_t inter = 0;
    uint64_t block = 0;
};
CaptureCounters& capture_counters();

// The designated constructors: every capture funnels through these so the
// counters stay meaningful.
IntraState make_intra(IntraState state);
InterState make_inter(InterState state);
BlockState make_block(BlockState state);

}  // namespace fpvm::oss

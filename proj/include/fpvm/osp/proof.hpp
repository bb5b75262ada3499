// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <map>

#include "fpvm/commit/block_hash_tree.hpp"
#include "fpvm/commit/memory_tree.hpp"
#include "fpvm/commit/mpt.hpp"
#include "fpvm/commit/stack_hash.hpp"
#include "fpvm/evm/gas.hpp"
#include "fpvm/evm/types.hpp"
#include "fpvm/oss/state.hpp"

namespace fpvm::osp {

// ---- subproofs ----

struct StackProofData {
    Hash32 h0;                     // chain head after the pops
    std::vector<Word256> popped;   // top elements in pop order

    bool operator==(const StackProofData&) const = default;
};

// Which committed byte array a memory span proof opens.
enum class MemTarget : uint8_t {
    Memory = 0,
    Input = 1,
    ReturnData = 2,
    CallerMemory = 3,
};

struct MemProofData {
    MemTarget target = MemTarget::Memory;
    MemSpanProof span;

    bool operator==(const MemProofData&) const = default;
};

struct MptProofData {
    MptProof proof;

    bool operator==(const MptProofData&) const = default;
};

struct CodeProofData {
    Bytes code;

    bool operator==(const CodeProofData&) const = default;
};

struct CallerStateData {
    oss::IntraState view;

    bool operator==(const CallerStateData&) const = default;
};

struct PriorInterData {
    oss::InterState view;

    bool operator==(const PriorInterData&) const = default;
};

struct BlockHashProofData {
    Hash32 old_leaf;
    std::vector<Hash32> path;

    bool operator==(const BlockHashProofData&) const = default;
};

struct AddressListData {
    std::vector<Address> addresses;

    bool operator==(const AddressListData&) const = default;
};

using SubProof = std::variant<StackProofData, MemProofData, MptProofData, CodeProofData,
                              CallerStateData, PriorInterData, BlockHashProofData,
                              AddressListData>;

// ---- the one-step proof ----

struct OneStepProof {
    oss::StepKind kind = oss::StepKind::Instruction;
    oss::OneStepState pre;
    std::optional<Bytes> bytecode;  // opcode proof: the executing contract's code
    std::vector<SubProof> subproofs;

    bool operator==(const OneStepProof&) const = default;
};

// ---- verification context ----

// The sequencer-posted data the verifier trusts: block contexts and the
// executed transactions, addressable by block number and execution index.
struct VerificationContext {
    struct BlockData {
        evm::BlockContext ctx;
        std::vector<evm::Transaction> txs;
    };
    evm::GasSchedule schedule;
    std::map<uint64_t, BlockData> blocks;

    const BlockData* block(uint64_t number) const {
        auto it = blocks.find(number);
        return it == blocks.end() ? nullptr : &it->second;
    }
    const evm::Transaction* tx(uint64_t number, uint64_t index) const {
        const BlockData* b = block(number);
        if (!b || index >= b->txs.size()) return nullptr;
        return &b->txs[index];
    }
};

// ---- verdicts ----

enum class RejectReason : uint8_t {
    None = 0,
    MalformedProof,
    StateHashMismatch,
    ContextMissing,
    OpcodeProofFailure,
    SubProofFailure,
    SimulationDivergence,
    PostHashMismatch,
};

std::string_view reject_reason_name(RejectReason reason);

struct Verdict {
    bool accept = false;
    RejectReason reason = RejectReason::None;
    std::string detail;
    uint64_t work_units = 0;  // keccak permutations consumed by verification

    static Verdict ok() { return {true, RejectReason::None, "", 0}; }
    static Verdict reject(RejectReason r, std::string d = "") {
        return {false, r, std::move(d), 0};
    }
};

}  // namespace fpvm::osp

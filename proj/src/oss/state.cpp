// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#include "fpvm/oss/state.hpp"

#include "fpvm/keccak.hpp"

namespace fpvm::oss {

Hash32 oss_hash(const IntraState& s) {
    Keccak256 h;
    h.update_u64be(s.block_number);
    h.update_u64be(s.tx_index);
    h.update_u64be(s.depth);
    h.update_u64be(s.gas);
    h.update_u64be(s.refund);
    h.update(s.last_depth_hash);
    if (s.depth > 1) h.update(s.contract);
    h.update(s.code_hash);
    if (s.depth > 1) {
        h.update(s.caller);
        h.update(BytesView(w256_bytes(s.value)));
        h.update_u8(s.call_flag);
        h.update_u8(s.writable ? 1 : 0);
        h.update_u64be(s.out_offset);
        h.update_u64be(s.out_size);
    }
    h.update_u64be(s.pc);
    h.update_u8(s.opcode);
    h.update_u64be(s.stack.size);
    h.update(s.stack.hash);
    h.update_u64be(s.memory_size);
    if (s.memory_size > 0) h.update(s.memory_root);
    h.update_u64be(s.input_size);
    if (s.input_size > 0) h.update(s.input_root);
    h.update_u64be(s.return_size);
    if (s.return_size > 0) h.update(s.return_root);
    h.update(s.world_root);
    h.update(s.committed_world_root);
    h.update(s.self_destruct_head);
    h.update(s.access_list_root);
    h.update(s.log_head);
    h.update(s.block_hash_tree_root);
    return h.final();
}

Hash32 oss_hash(const InterState& s) {
    Keccak256 h;
    h.update_u64be(s.block_number);
    h.update_u64be(s.tx_index);
    h.update(s.world_root);
    h.update_u64be(s.cumulative_gas);
    h.update_u64be(s.block_gas_used);
    h.update(s.block_hash_tree_root);
    h.update(s.tx_trie_root);
    h.update(s.receipt_trie_root);
    return h.final();
}

Hash32 oss_hash(const BlockState& s) {
    Keccak256 h;
    h.update_u64be(s.block_number);
    h.update(s.world_root);
    h.update_u64be(s.cumulative_gas);
    h.update(s.block_hash_tree_root);
    return h.final();
}

Hash32 oss_hash(const OneStepState& s) {
    return std::visit([](const auto& v) { return oss_hash(v); }, s);
}

std::string_view step_kind_name(StepKind kind) {
    switch (kind) {
        case StepKind::Instruction: return "instruction";
        case StepKind::TxInit: return "tx-init";
        case StepKind::TxFinalize: return "tx-finalize";
        case StepKind::BlockInit: return "block-init";
        case StepKind::BlockFinalize: return "block-finalize";
        case StepKind::RegularTx: return "regular-tx";
    }
    return "?";
}

std::optional<StepKind> classify_transition(const OneStepState& from, const OneStepState& to) {
    if (std::holds_alternative<BlockState>(from) && std::holds_alternative<InterState>(to))
        return StepKind::BlockInit;
    if (std::holds_alternative<InterState>(from) && std::holds_alternative<BlockState>(to))
        return StepKind::BlockFinalize;
    if (std::holds_alternative<InterState>(from) && std::holds_alternative<IntraState>(to))
        return StepKind::TxInit;
    if (std::holds_alternative<IntraState>(from) && std::holds_alternative<InterState>(to))
        return StepKind::TxFinalize;
    if (std::holds_alternative<InterState>(from) && std::holds_alternative<InterState>(to))
        return StepKind::RegularTx;
    if (std::holds_alternative<IntraState>(from) && std::holds_alternative<IntraState>(to))
        return StepKind::Instruction;
    return std::nullopt;  // block -> block and block -> intra cannot happen
}

CaptureCounters& capture_counters() {
    static CaptureCounters counters;
    return counters;
}

IntraState make_intra(IntraState state) {
    ++capture_counters().intra;
    return state;
}

InterState make_inter(InterState state) {
    ++capture_counters().inter;
    return state;
}

BlockState make_block(BlockState state) {
    ++capture_counters().block;
    return state;
}

}  // namespace fpvm::oss

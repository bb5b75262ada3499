// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#include "fpvm/corpus.hpp"

#include <stdexcept>

#include "fpvm/evm/opcodes.hpp"

namespace fpvm {

using namespace evm;

Asm& Asm::op(uint8_t opcode) {
    code_.push_back(opcode);
    return *this;
}

Asm& Asm::raw(BytesView bytes) {
    append(code_, bytes);
    return *this;
}

Asm& Asm::push(const Word256& value) {
    unsigned len = w256_byte_length(value);
    if (len == 0) {
        code_.push_back(OP_PUSH0);
        return *this;
    }
    auto full = w256_bytes(value);
    code_.push_back(static_cast<uint8_t>(OP_PUSH1 + len - 1));
    append(code_, BytesView(full.data() + (32 - len), len));
    return *this;
}

Asm& Asm::push(const Address& a) {
    code_.push_back(static_cast<uint8_t>(OP_PUSH1 + 19));
    append(code_, BytesView(a.bytes));
    return *this;
}

Asm& Asm::push_bytes(BytesView raw) {
    if (raw.empty() || raw.size() > 32) throw std::invalid_argument("push_bytes: bad width");
    code_.push_back(static_cast<uint8_t>(OP_PUSH1 + raw.size() - 1));
    append(code_, raw);
    return *this;
}

Asm& Asm::label(const std::string& name) {
    labels_[name] = static_cast<uint16_t>(code_.size());
    code_.push_back(OP_JUMPDEST);
    return *this;
}

Asm& Asm::data_label(const std::string& name) {
    labels_[name] = static_cast<uint16_t>(code_.size());
    return *this;
}

Asm& Asm::push_label(const std::string& name) {
    code_.push_back(OP_PUSH1 + 1);  // PUSH2
    fixups_.push_back({code_.size(), name});
    code_.push_back(0);
    code_.push_back(0);
    return *this;
}

Asm& Asm::jump(const std::string& name) { return push_label(name).op(OP_JUMP); }
Asm& Asm::jumpi(const std::string& name) { return push_label(name).op(OP_JUMPI); }

Bytes Asm::build() const {
    Bytes out = code_;
    for (const Fixup& f : fixups_) {
        auto it = labels_.find(f.name);
        if (it == labels_.end()) throw std::invalid_argument("unresolved label " + f.name);
        out[f.at] = static_cast<uint8_t>(it->second >> 8);
        out[f.at + 1] = static_cast<uint8_t>(it->second & 0xff);
    }
    return out;
}

Bytes deploy_wrapper(BytesView runtime) {
    // PUSH size, PUSH srcoffset, PUSH 0, CODECOPY, PUSH size, PUSH 0, RETURN
    Asm a;
    Bytes prefix;
    // Two-pass: the copy offset depends on the prefix length. The prefix
    // layout below is fixed-width (PUSH2 sizes), so one sizing pass suffices.
    auto emit = [&](uint16_t src_off) {
        Asm w;
        uint8_t size_hi = static_cast<uint8_t>(runtime.size() >> 8);
        uint8_t size_lo = static_cast<uint8_t>(runtime.size() & 0xff);
        Bytes size_bytes = {size_hi, size_lo};
        w.push_bytes(size_bytes);
        Bytes off_bytes = {static_cast<uint8_t>(src_off >> 8),
                           static_cast<uint8_t>(src_off & 0xff)};
        w.push_bytes(off_bytes);
        w.push(Word256(0));
        w.op(OP_CODECOPY);
        w.push_bytes(size_bytes);
        w.push(Word256(0));
        w.op(OP_RETURN);
        return w.build();
    };
    Bytes head = emit(0);
    head = emit(static_cast<uint16_t>(head.size()));
    Bytes out = head;
    append(out, runtime);
    return out;
}

Bytes erc20_runtime() {
    Asm a;
    // selector := first calldata byte
    a.push(0).op(OP_CALLDATALOAD).push(248).op(OP_SHR);
    a.op(op_dup(1)).push(1).op(OP_EQ).jumpi("transfer");
    a.op(op_dup(1)).push(2).op(OP_EQ).jumpi("balance_of");
    a.op(op_dup(1)).push(3).op(OP_EQ).jumpi("mint");
    a.push(0).push(0).op(OP_REVERT);

    // transfer(to @1..33, amount @33..65); stack comments grow rightward.
    a.label("transfer");
    a.op(OP_POP);
    a.push(33).op(OP_CALLDATALOAD);              // [amt]
    a.push(1).op(OP_CALLDATALOAD);               // [amt to]
    a.op(OP_CALLER).op(OP_SLOAD);                // [amt to sbal]
    a.op(op_dup(3)).op(op_dup(2)).op(OP_LT);         // [amt to sbal sbal<amt]
    a.jumpi("insufficient");                     // [amt to sbal]
    a.op(op_dup(3)).op(op_swap(1)).op(OP_SUB);       // [amt to sbal-amt]
    a.op(OP_CALLER).op(OP_SSTORE);               // [amt to]
    a.op(op_dup(1)).op(OP_SLOAD);                  // [amt to tobal]
    a.op(op_dup(3)).op(OP_ADD);                    // [amt to tobal+amt]
    a.op(op_dup(2)).op(OP_SSTORE);                 // [amt to]
    a.op(op_dup(2)).push(0).op(OP_MSTORE);         // mem[0..32) = amt
    a.push(32).push(0);                          // [amt to 32 0]
    a.op(op_log(2));                               // topics (to, amt); []
    a.push(1).push(0).op(OP_MSTORE8);
    a.push(1).push(0).op(OP_RETURN);             // returns 0x01

    a.label("insufficient");
    a.push(0).push(0).op(OP_REVERT);

    // balanceOf(addr @1..33)
    a.label("balance_of");
    a.op(OP_POP);
    a.push(1).op(OP_CALLDATALOAD).op(OP_SLOAD);
    a.push(0).op(OP_MSTORE);
    a.push(32).push(0).op(OP_RETURN);

    // mint(to @1..33, amount @33..65)
    a.label("mint");
    a.op(OP_POP);
    a.push(33).op(OP_CALLDATALOAD);              // [amt]
    a.push(1).op(OP_CALLDATALOAD);               // [amt to]
    a.op(op_dup(1)).op(OP_SLOAD);                  // [amt to tobal]
    a.op(op_dup(3)).op(OP_ADD);                    // [amt to tobal+amt]
    a.op(op_dup(2)).op(OP_SSTORE);                 // [amt to]
    a.op(OP_POP).op(OP_POP);
    a.push(1).push(0).op(OP_MSTORE8);
    a.push(1).push(0).op(OP_RETURN);

    return a.build();
}

CorpusPrograms corpus_programs() {
    CorpusPrograms p;
    p.runtime["erc20"] = erc20_runtime();
    return p;
}

}  // namespace fpvm

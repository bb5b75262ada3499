// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <map>
#include <string>

#include "fpvm/evm/types.hpp"

namespace fpvm {

// Small bytecode assembler with two-byte label jumps, used to write the
// bundled fixture contracts.
class Asm {
public:
    Asm& op(uint8_t opcode);
    Asm& raw(BytesView bytes);
    // Minimal-width PUSH of a value (PUSH0/PUSH1..PUSH32).
    Asm& push(const Word256& value);
    Asm& push(uint64_t value) { return push(Word256(value)); }
    Asm& push(const Address& a);
    Asm& push_bytes(BytesView raw);  // PUSHn of the raw bytes as given
    Asm& label(const std::string& name);
    Asm& data_label(const std::string& name);  // no JUMPDEST emitted
    Asm& push_label(const std::string& name);  // PUSH2 placeholder
    Asm& jump(const std::string& name);
    Asm& jumpi(const std::string& name);
    Bytes build() const;

private:
    struct Fixup {
        size_t at;
        std::string name;
    };
    Bytes code_;
    std::map<std::string, uint16_t> labels_;
    std::vector<Fixup> fixups_;
};

// Wraps runtime bytecode into standard initcode (CODECOPY + RETURN).
Bytes deploy_wrapper(BytesView runtime);

// Bundled fixture programs. Each entry is runtime bytecode by name; the
// scenario builder wires them into genesis accounts and transactions.
struct CorpusPrograms {
    std::map<std::string, Bytes> runtime;
};
CorpusPrograms corpus_programs();

// The ERC20-like token used by the bundled scenario. Dispatches on the
// first calldata byte: 1 transfer(to, amount), 2 balanceOf(addr),
// 3 mint(to, amount). Balances live at slot == holder address.
Bytes erc20_runtime();

}  // namespace fpvm

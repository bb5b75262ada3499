// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#include "fpvm/evm/opcodes.hpp"

#include <array>

namespace fpvm::evm {

namespace {

constexpr uint16_t S = SP_STACK;

std::array<OpcodeInfo, 256> build_table() {
    std::array<OpcodeInfo, 256> t{};
    for (auto& e : t) e = {"UNDEFINED", 0, 0, 0, false};

    auto set = [&](uint8_t op, std::string_view name, uint8_t delta, uint8_t alpha,
                   uint16_t comp) { t[op] = {name, delta, alpha, comp, true}; };

    set(OP_STOP, "STOP", 0, 0, SP_ACCOUNT_W);
    set(OP_ADD, "ADD", 2, 1, S);
    set(OP_MUL, "MUL", 2, 1, S);
    set(OP_SUB, "SUB", 2, 1, S);
    set(OP_DIV, "DIV", 2, 1, S);
    set(OP_SDIV, "SDIV", 2, 1, S);
    set(OP_MOD, "MOD", 2, 1, S);
    set(OP_SMOD, "SMOD", 2, 1, S);
    set(OP_ADDMOD, "ADDMOD", 3, 1, S);
    set(OP_MULMOD, "MULMOD", 3, 1, S);
    set(OP_EXP, "EXP", 2, 1, S);
    set(OP_SIGNEXTEND, "SIGNEXTEND", 2, 1, S);
    set(OP_LT, "LT", 2, 1, S);
    set(OP_GT, "GT", 2, 1, S);
    set(OP_SLT, "SLT", 2, 1, S);
    set(OP_SGT, "SGT", 2, 1, S);
    set(OP_EQ, "EQ", 2, 1, S);
    set(OP_ISZERO, "ISZERO", 1, 1, S);
    set(OP_AND, "AND", 2, 1, S);
    set(OP_OR, "OR", 2, 1, S);
    set(OP_XOR, "XOR", 2, 1, S);
    set(OP_NOT, "NOT", 1, 1, S);
    set(OP_BYTE, "BYTE", 2, 1, S);
    set(OP_SHL, "SHL", 2, 1, S);
    set(OP_SHR, "SHR", 2, 1, S);
    set(OP_SAR, "SAR", 2, 1, S);
    set(OP_KECCAK256, "KECCAK256", 2, 1, S | SP_MEMORY_R);
    set(OP_ADDRESS, "ADDRESS", 0, 1, S);
    set(OP_BALANCE, "BALANCE", 1, 1, S | SP_ACCOUNT_R | SP_ACCESS);
    set(OP_ORIGIN, "ORIGIN", 0, 1, S);
    set(OP_CALLER, "CALLER", 0, 1, S);
    set(OP_CALLVALUE, "CALLVALUE", 0, 1, S);
    set(OP_CALLDATALOAD, "CALLDATALOAD", 1, 1, S | SP_INPUT_R);
    set(OP_CALLDATASIZE, "CALLDATASIZE", 0, 1, S);
    set(OP_CALLDATACOPY, "CALLDATACOPY", 3, 0, S | SP_INPUT_R | SP_MEMORY_W);
    set(OP_CODESIZE, "CODESIZE", 0, 1, S);
    set(OP_CODECOPY, "CODECOPY", 3, 0, S | SP_MEMORY_W);
    set(OP_GASPRICE, "GASPRICE", 0, 1, S);
    set(OP_EXTCODESIZE, "EXTCODESIZE", 1, 1, S | SP_ACCOUNT_R | SP_CODE | SP_ACCESS);
    set(OP_EXTCODECOPY, "EXTCODECOPY", 4, 0,
        S | SP_ACCOUNT_R | SP_CODE | SP_MEMORY_W | SP_ACCESS);
    set(OP_RETURNDATASIZE, "RETURNDATASIZE", 0, 1, S);
    set(OP_RETURNDATACOPY, "RETURNDATACOPY", 3, 0, S | SP_RETURN_R | SP_MEMORY_W);
    set(OP_EXTCODEHASH, "EXTCODEHASH", 1, 1, S | SP_ACCOUNT_R | SP_ACCESS);
    set(OP_BLOCKHASH, "BLOCKHASH", 1, 1, S | SP_BLOCKHASH);
    set(OP_COINBASE, "COINBASE", 0, 1, S);
    set(OP_TIMESTAMP, "TIMESTAMP", 0, 1, S);
    set(OP_NUMBER, "NUMBER", 0, 1, S);
    set(OP_GASLIMIT, "GASLIMIT", 0, 1, S);
    set(OP_SELFBALANCE, "SELFBALANCE", 0, 1, S | SP_ACCOUNT_R);
    set(OP_BASEFEE, "BASEFEE", 0, 1, S);
    set(OP_POP, "POP", 1, 0, S);
    set(OP_MLOAD, "MLOAD", 1, 1, S | SP_MEMORY_R);
    set(OP_MSTORE, "MSTORE", 2, 0, S | SP_MEMORY_W);
    set(OP_MSTORE8, "MSTORE8", 2, 0, S | SP_MEMORY_W);
    set(OP_SLOAD, "SLOAD", 1, 1, S | SP_ACCOUNT_R | SP_STORAGE_R | SP_ACCESS);
    set(OP_SSTORE, "SSTORE", 2, 0, S | SP_ACCOUNT_W | SP_STORAGE_W | SP_ACCESS);
    set(OP_JUMP, "JUMP", 1, 0, S);
    set(OP_JUMPI, "JUMPI", 2, 0, S);
    set(OP_PC, "PC", 0, 1, S);
    set(OP_MSIZE, "MSIZE", 0, 1, S);
    set(OP_GAS, "GAS", 0, 1, S);
    set(OP_JUMPDEST, "JUMPDEST", 0, 0, 0);
    set(OP_PUSH0, "PUSH0", 0, 1, S);

    constexpr std::string_view push_names[] = {
        "PUSH1",  "PUSH2",  "PUSH3",  "PUSH4",  "PUSH5",  "PUSH6",  "PUSH7",  "PUSH8",
        "PUSH9",  "PUSH10", "PUSH11", "PUSH12", "PUSH13", "PUSH14", "PUSH15", "PUSH16",
        "PUSH17", "PUSH18", "PUSH19", "PUSH20", "PUSH21", "PUSH22", "PUSH23", "PUSH24",
        "PUSH25", "PUSH26", "PUSH27", "PUSH28", "PUSH29", "PUSH30", "PUSH31", "PUSH32"};
    for (int i = 0; i < 32; ++i) set(OP_PUSH1 + i, push_names[i], 0, 1, S);

    constexpr std::string_view dup_names[] = {"DUP1",  "DUP2",  "DUP3",  "DUP4",
                                              "DUP5",  "DUP6",  "DUP7",  "DUP8",
                                              "DUP9",  "DUP10", "DUP11", "DUP12",
                                              "DUP13", "DUP14", "DUP15", "DUP16"};
    for (int i = 0; i < 16; ++i)
        set(OP_DUP1 + i, dup_names[i], static_cast<uint8_t>(i + 1), static_cast<uint8_t>(i + 2), S);

    constexpr std::string_view swap_names[] = {"SWAP1",  "SWAP2",  "SWAP3",  "SWAP4",
                                               "SWAP5",  "SWAP6",  "SWAP7",  "SWAP8",
                                               "SWAP9",  "SWAP10", "SWAP11", "SWAP12",
                                               "SWAP13", "SWAP14", "SWAP15", "SWAP16"};
    for (int i = 0; i < 16; ++i)
        set(OP_SWAP1 + i, swap_names[i], static_cast<uint8_t>(i + 2),
            static_cast<uint8_t>(i + 2), S);

    constexpr std::string_view log_names[] = {"LOG0", "LOG1", "LOG2", "LOG3", "LOG4"};
    for (int i = 0; i < 5; ++i)
        set(OP_LOG0 + i, log_names[i], static_cast<uint8_t>(i + 2), 0, S | SP_MEMORY_R);

    set(OP_CREATE, "CREATE", 3, 1, S | SP_MEMORY_R | SP_ACCOUNT_W | SP_ACCESS);
    set(OP_CALL, "CALL", 7, 1, S | SP_MEMORY_R | SP_ACCOUNT_W | SP_ACCESS);
    set(OP_CALLCODE, "CALLCODE", 7, 1, S | SP_MEMORY_R | SP_ACCOUNT_W | SP_ACCESS);
    set(OP_RETURN, "RETURN", 2, 0, S | SP_MEMORY_R | SP_ACCOUNT_W);
    set(OP_DELEGATECALL, "DELEGATECALL", 6, 1, S | SP_MEMORY_R | SP_ACCOUNT_W | SP_ACCESS);
    set(OP_CREATE2, "CREATE2", 4, 1, S | SP_MEMORY_R | SP_ACCOUNT_W | SP_ACCESS);
    set(OP_STATICCALL, "STATICCALL", 6, 1, S | SP_MEMORY_R | SP_ACCOUNT_W | SP_ACCESS);
    set(OP_REVERT, "REVERT", 2, 0, S | SP_MEMORY_R | SP_ACCOUNT_W);
    set(OP_INVALID, "INVALID", 0, 0, SP_ACCOUNT_W);
    set(OP_SELFDESTRUCT, "SELFDESTRUCT", 1, 0, S | SP_ACCOUNT_R | SP_ACCOUNT_W | SP_ACCESS);

    return t;
}

const std::array<OpcodeInfo, 256> kTable = build_table();

}  // namespace

const OpcodeInfo& opcode_info(uint8_t opcode) { return kTable[opcode]; }

}  // namespace fpvm::evm

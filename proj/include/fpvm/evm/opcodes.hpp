// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace fpvm::evm {

enum Opcode : uint8_t {
    OP_STOP = 0x00,
    OP_ADD = 0x01,
    OP_MUL = 0x02,
    OP_SUB = 0x03,
    OP_DIV = 0x04,
    OP_SDIV = 0x05,
    OP_MOD = 0x06,
    OP_SMOD = 0x07,
    OP_ADDMOD = 0x08,
    OP_MULMOD = 0x09,
    OP_EXP = 0x0a,
    OP_SIGNEXTEND = 0x0b,
    OP_LT = 0x10,
    OP_GT = 0x11,
    OP_SLT = 0x12,
    OP_SGT = 0x13,
    OP_EQ = 0x14,
    OP_ISZERO = 0x15,
    OP_AND = 0x16,
    OP_OR = 0x17,
    OP_XOR = 0x18,
    OP_NOT = 0x19,
    OP_BYTE = 0x1a,
    OP_SHL = 0x1b,
    OP_SHR = 0x1c,
    OP_SAR = 0x1d,
    OP_KECCAK256 = 0x20,
    OP_ADDRESS = 0x30,
    OP_BALANCE = 0x31,
    OP_ORIGIN = 0x32,
    OP_CALLER = 0x33,
    OP_CALLVALUE = 0x34,
    OP_CALLDATALOAD = 0x35,
    OP_CALLDATASIZE = 0x36,
    OP_CALLDATACOPY = 0x37,
    OP_CODESIZE = 0x38,
    OP_CODECOPY = 0x39,
    OP_GASPRICE = 0x3a,
    OP_EXTCODESIZE = 0x3b,
    OP_EXTCODECOPY = 0x3c,
    OP_RETURNDATASIZE = 0x3d,
    OP_RETURNDATACOPY = 0x3e,
    OP_EXTCODEHASH = 0x3f,
    OP_BLOCKHASH = 0x40,
    OP_COINBASE = 0x41,
    OP_TIMESTAMP = 0x42,
    OP_NUMBER = 0x43,
    OP_GASLIMIT = 0x45,
    OP_SELFBALANCE = 0x47,
    OP_BASEFEE = 0x48,
    OP_POP = 0x50,
    OP_MLOAD = 0x51,
    OP_MSTORE = 0x52,
    OP_MSTORE8 = 0x53,
    OP_SLOAD = 0x54,
    OP_SSTORE = 0x55,
    OP_JUMP = 0x56,
    OP_JUMPI = 0x57,
    OP_PC = 0x58,
    OP_MSIZE = 0x59,
    OP_GAS = 0x5a,
    OP_JUMPDEST = 0x5b,
    OP_PUSH0 = 0x5f,
    OP_PUSH1 = 0x60,
    OP_PUSH32 = 0x7f,
    OP_DUP1 = 0x80,
    OP_DUP16 = 0x8f,
    OP_SWAP1 = 0x90,
    OP_SWAP16 = 0x9f,
    OP_LOG0 = 0xa0,
    OP_LOG4 = 0xa4,
    OP_CREATE = 0xf0,
    OP_CALL = 0xf1,
    OP_CALLCODE = 0xf2,
    OP_RETURN = 0xf3,
    OP_DELEGATECALL = 0xf4,
    OP_CREATE2 = 0xf5,
    OP_STATICCALL = 0xfa,
    OP_REVERT = 0xfd,
    OP_INVALID = 0xfe,
    OP_SELFDESTRUCT = 0xff,
};

// Subproof kinds an instruction's one-step proof is composed of.
enum SubProofKind : uint16_t {
    SP_STACK = 1 << 0,
    SP_MEMORY_R = 1 << 1,
    SP_MEMORY_W = 1 << 2,
    SP_ACCOUNT_R = 1 << 3,
    SP_ACCOUNT_W = 1 << 4,
    SP_STORAGE_R = 1 << 5,
    SP_STORAGE_W = 1 << 6,
    SP_CODE = 1 << 7,
    SP_CALLER_STATE = 1 << 8,  // state proof of the last depth's OSS
    SP_BLOCKHASH = 1 << 9,
    SP_ACCESS = 1 << 10,       // access-list trie openings
    SP_INPUT_R = 1 << 11,      // read of the input-data tree
    SP_RETURN_R = 1 << 12,     // read of the return-data tree
};

struct OpcodeInfo {
    std::string_view name;
    uint8_t delta;          // stack arguments消 consumed
    uint8_t alpha;          // stack results produced
    uint16_t composition;   // baseline subproof kinds for a normal step
    bool supported;
};

const OpcodeInfo& opcode_info(uint8_t opcode);

inline constexpr uint8_t op_dup(unsigned n) { return static_cast<uint8_t>(OP_DUP1 + n - 1); }
inline constexpr uint8_t op_swap(unsigned n) { return static_cast<uint8_t>(OP_SWAP1 + n - 1); }
inline constexpr uint8_t op_log(unsigned n) { return static_cast<uint8_t>(OP_LOG0 + n); }

inline bool is_push(uint8_t op) { return op >= OP_PUSH1 && op <= OP_PUSH32; }
inline bool is_dup(uint8_t op) { return op >= OP_DUP1 && op <= OP_DUP16; }
inline bool is_swap(uint8_t op) { return op >= OP_SWAP1 && op <= OP_SWAP16; }
inline bool is_log(uint8_t op) { return op >= OP_LOG0 && op <= OP_LOG4; }
inline bool is_call_kind(uint8_t op) {
    return op == OP_CALL || op == OP_CALLCODE || op == OP_DELEGATECALL || op == OP_STATICCALL;
}
inline bool is_create_kind(uint8_t op) { return op == OP_CREATE || op == OP_CREATE2; }

// Opcodes that mutate state and are forbidden inside a static frame.
// CALL joins the set only when it carries value; that case is handled at the
// call site since it depends on an operand.
inline bool is_write_op(uint8_t op) {
    return op == OP_SSTORE || is_log(op) || is_create_kind(op) || op == OP_SELFDESTRUCT;
}

// Opcodes that end a frame.
inline bool is_terminal(uint8_t op) {
    return op == OP_STOP || op == OP_RETURN || op == OP_REVERT || op == OP_INVALID ||
           op == OP_SELFDESTRUCT;
}

}  // namespace fpvm::evm

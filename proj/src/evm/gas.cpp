// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#include "fpvm/evm/gas.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fpvm::evm {

GasSchedule::GasSchedule() {
    auto tier = [&](std::initializer_list<uint8_t> ops, uint64_t cost) {
        for (uint8_t op : ops) base_cost[op] = cost;
    };

    tier({OP_STOP, OP_RETURN, OP_REVERT, OP_INVALID}, 0);
    tier({OP_ADDRESS, OP_ORIGIN, OP_CALLER, OP_CALLVALUE, OP_CALLDATASIZE, OP_CODESIZE,
          OP_GASPRICE, OP_RETURNDATASIZE, OP_PC, OP_MSIZE, OP_GAS, OP_COINBASE, OP_TIMESTAMP,
          OP_NUMBER, OP_GASLIMIT, OP_BASEFEE, OP_POP, OP_PUSH0},
         2);
    tier({OP_ADD, OP_SUB, OP_NOT, OP_LT, OP_GT, OP_SLT, OP_SGT, OP_EQ, OP_ISZERO, OP_AND, OP_OR,
          OP_XOR, OP_BYTE, OP_SHL, OP_SHR, OP_SAR, OP_CALLDATALOAD, OP_MLOAD, OP_MSTORE,
          OP_MSTORE8, OP_CALLDATACOPY, OP_CODECOPY, OP_RETURNDATACOPY},
         3);
    tier({OP_MUL, OP_DIV, OP_SDIV, OP_MOD, OP_SMOD, OP_SIGNEXTEND, OP_SELFBALANCE}, 5);
    tier({OP_ADDMOD, OP_MULMOD, OP_JUMP}, 8);
    tier({OP_JUMPI}, 10);
    tier({OP_EXP}, 10);
    tier({OP_JUMPDEST}, 1);
    tier({OP_BLOCKHASH}, 20);
    tier({OP_KECCAK256}, 30);
    // Warm/cold surcharges replace the base for state-access ops.
    tier({OP_BALANCE, OP_EXTCODESIZE, OP_EXTCODECOPY, OP_EXTCODEHASH, OP_SLOAD, OP_SSTORE,
          OP_CALL, OP_CALLCODE, OP_DELEGATECALL, OP_STATICCALL},
         0);
    tier({OP_CREATE, OP_CREATE2}, 32000);
    tier({OP_SELFDESTRUCT}, 5000);

    for (int i = 0; i < 32; ++i) base_cost[OP_PUSH1 + i] = 3;
    for (int i = 0; i < 16; ++i) base_cost[OP_DUP1 + i] = 3;
    for (int i = 0; i < 16; ++i) base_cost[OP_SWAP1 + i] = 3;
    for (int i = 0; i < 5; ++i) base_cost[OP_LOG0 + i] = 375;
}

uint64_t GasSchedule::memory_cost(uint64_t words) const {
    uint64_t linear = saturating_mul(memory_word_cost, words);
    uint64_t quad = memory_quad_divisor == 0
                        ? 0
                        : saturating_mul(words, words) / memory_quad_divisor;
    if (words != 0 && saturating_mul(words, words) == UINT64_MAX) quad = UINT64_MAX;
    return saturating_add(linear, quad);
}

uint64_t GasSchedule::memory_expansion_cost(uint64_t old_words, uint64_t new_words) const {
    if (new_words <= old_words) return 0;
    uint64_t after = memory_cost(new_words);
    uint64_t before = memory_cost(old_words);
    return after == UINT64_MAX ? UINT64_MAX : after - before;
}

uint64_t GasSchedule::intrinsic_cost(BytesView data, bool is_create) const {
    uint64_t cost = tx_base_cost + (is_create ? tx_create_cost : 0);
    for (uint8_t b : data) cost += b == 0 ? tx_data_zero_cost : tx_data_nonzero_cost;
    return cost;
}

uint64_t GasSchedule::forwarded_gas(uint64_t requested, uint64_t available) const {
    uint64_t cap = available;
    if (call_gas_retention_divisor > 1) cap = available - available / call_gas_retention_divisor;
    return std::min(requested, cap);
}

uint64_t words_to_cover(uint64_t offset, uint64_t size) {
    if (size == 0) return 0;
    uint64_t end = saturating_add(offset, size);
    uint64_t padded = saturating_add(end, 31);
    return padded == UINT64_MAX ? UINT64_MAX / 32 : padded / 32;
}

namespace {

using nlohmann::json;

const std::pair<const char*, uint64_t GasSchedule::*> kScalars[] = {
    {"memoryWordCost", &GasSchedule::memory_word_cost},
    {"memoryQuadDivisor", &GasSchedule::memory_quad_divisor},
    {"copyWordCost", &GasSchedule::copy_word_cost},
    {"keccakWordCost", &GasSchedule::keccak_word_cost},
    {"expByteCost", &GasSchedule::exp_byte_cost},
    {"logTopicCost", &GasSchedule::log_topic_cost},
    {"logDataByteCost", &GasSchedule::log_data_byte_cost},
    {"coldAccountCost", &GasSchedule::cold_account_cost},
    {"coldSloadCost", &GasSchedule::cold_sload_cost},
    {"warmAccessCost", &GasSchedule::warm_access_cost},
    {"sstoreSetCost", &GasSchedule::sstore_set_cost},
    {"sstoreResetCost", &GasSchedule::sstore_reset_cost},
    {"sstoreClearRefund", &GasSchedule::sstore_clear_refund},
    {"callValueCost", &GasSchedule::call_value_cost},
    {"callStipend", &GasSchedule::call_stipend},
    {"newAccountCost", &GasSchedule::new_account_cost},
    {"codeDepositByteCost", &GasSchedule::code_deposit_byte_cost},
    {"callGasRetentionDivisor", &GasSchedule::call_gas_retention_divisor},
    {"txBaseCost", &GasSchedule::tx_base_cost},
    {"txCreateCost", &GasSchedule::tx_create_cost},
    {"txDataZeroCost", &GasSchedule::tx_data_zero_cost},
    {"txDataNonzeroCost", &GasSchedule::tx_data_nonzero_cost},
    {"refundQuotient", &GasSchedule::refund_quotient},
    {"maxCodeSize", &GasSchedule::max_code_size},
    {"maxInitcodeSize", &GasSchedule::max_initcode_size},
    {"stackLimit", &GasSchedule::stack_limit},
    {"callDepthLimit", &GasSchedule::call_depth_limit},
};

}  // namespace

GasSchedule GasSchedule::from_json(const std::string& text) {
    GasSchedule schedule;
    json j = json::parse(text);
    for (const auto& [key, member] : kScalars)
        if (j.contains(key)) schedule.*member = j.at(key).get<uint64_t>();
    if (j.contains("opcodes")) {
        for (const auto& [name, cost] : j.at("opcodes").items()) {
            bool found = false;
            for (int op = 0; op < 256; ++op) {
                const auto& info = opcode_info(static_cast<uint8_t>(op));
                if (info.supported && info.name == name) {
                    schedule.base_cost[op] = cost.get<uint64_t>();
                    found = true;
                }
            }
            if (!found) throw std::runtime_error("gas schedule: unknown opcode " + name);
        }
    }
    return schedule;
}

GasSchedule GasSchedule::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open gas schedule: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::string GasSchedule::to_json() const {
    json j;
    GasSchedule defaults;
    for (const auto& [key, member] : kScalars) j[key] = this->*member;
    json ops;
    for (int op = 0; op < 256; ++op) {
        const auto& info = opcode_info(static_cast<uint8_t>(op));
        if (info.supported) ops[std::string(info.name)] = base_cost[op];
    }
    j["opcodes"] = ops;
    return j.dump(2);
}

}  // namespace fpvm::evm

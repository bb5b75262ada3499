// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <string>

#include "fpvm/bytes.hpp"
#include "fpvm/evm/opcodes.hpp"

namespace fpvm::evm {

// Configurable gas schedule shared bit-exactly by the interpreter and the
// one-step verifier. The defaults follow the familiar tiered costs with
// quadratic memory expansion and warm/cold access surcharges; the exact
// numbers are a parameter of the system, not a consensus target.
struct GasSchedule {
    std::array<uint64_t, 256> base_cost{};

    uint64_t memory_word_cost = 3;
    uint64_t memory_quad_divisor = 512;
    uint64_t copy_word_cost = 3;
    uint64_t keccak_word_cost = 6;
    uint64_t exp_byte_cost = 50;
    uint64_t log_topic_cost = 375;
    uint64_t log_data_byte_cost = 8;

    uint64_t cold_account_cost = 2600;
    uint64_t cold_sload_cost = 2100;
    uint64_t warm_access_cost = 100;
    uint64_t sstore_set_cost = 20000;
    uint64_t sstore_reset_cost = 2900;
    uint64_t sstore_clear_refund = 4800;

    uint64_t call_value_cost = 9000;
    uint64_t call_stipend = 0;
    uint64_t new_account_cost = 25000;
    uint64_t code_deposit_byte_cost = 200;
    // 0 forwards min(requested, available); 64 gives the 63/64 hold-back.
    uint64_t call_gas_retention_divisor = 0;

    uint64_t tx_base_cost = 21000;
    uint64_t tx_create_cost = 32000;
    uint64_t tx_data_zero_cost = 4;
    uint64_t tx_data_nonzero_cost = 16;
    uint64_t refund_quotient = 5;

    uint64_t max_code_size = 24576;
    uint64_t max_initcode_size = 49152;
    uint64_t stack_limit = 1024;
    uint64_t call_depth_limit = 1024;

    GasSchedule();

    static GasSchedule from_json_file(const std::string& path);
    static GasSchedule from_json(const std::string& text);
    std::string to_json() const;

    // ---- pure cost formulas ----

    // Total cost of holding `words` memory words.
    uint64_t memory_cost(uint64_t words) const;
    // Cost of growing from old_words to new_words (0 when not growing).
    uint64_t memory_expansion_cost(uint64_t old_words, uint64_t new_words) const;
    uint64_t copy_cost(uint64_t bytes) const { return copy_word_cost * ((bytes + 31) / 32); }
    uint64_t keccak_cost(uint64_t bytes) const {
        return base_cost[OP_KECCAK256] + keccak_word_cost * ((bytes + 31) / 32);
    }
    uint64_t intrinsic_cost(BytesView data, bool is_create) const;
    uint64_t forwarded_gas(uint64_t requested, uint64_t available) const;
};

// Words needed to cover the byte range [offset, offset+size); saturates on
// overflow so that absurd offsets price as unpayable rather than wrapping.
uint64_t words_to_cover(uint64_t offset, uint64_t size);

inline uint64_t saturating_add(uint64_t a, uint64_t b) {
    uint64_t s = a + b;
    return s < a ? UINT64_MAX : s;
}

inline uint64_t saturating_mul(uint64_t a, uint64_t b) {
    if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
    return a * b;
}

}  // namespace fpvm::evm

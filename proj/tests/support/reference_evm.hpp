// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

// Test-only reference interpreter used as the fidelity oracle. It shares the
// gas schedule (by design: interpreter and verifier run one schedule) and the
// byte-level primitives, but nothing of the production machine: flat maps
// instead of tries, recursion instead of an explicit frame stack, and its own
// dispatch.

#pragma once

#include <map>
#include <set>

#include "fpvm/evm/gas.hpp"
#include "fpvm/evm/types.hpp"

namespace fpvm::test {

struct RefAccount {
    uint64_t nonce = 0;
    Word256 balance = 0;
    Bytes code;
    std::map<Word256, Word256> storage;
};

struct RefTxSummary {
    bool skipped = false;
    uint8_t status = 0;
    uint64_t gas_used = 0;
    Hash32 log_head;
    Bytes return_data;
};

class RefEvm {
public:
    explicit RefEvm(evm::GasSchedule schedule) : g_(std::move(schedule)) {}

    std::map<Address, RefAccount> accounts;

    std::vector<RefTxSummary> execute_block(const evm::BlockContext& ctx,
                                            const std::vector<evm::Transaction>& txs);

    // Recent block hashes for BLOCKHASH, keyed by block number.
    std::map<uint64_t, Hash32> recent_block_hashes;
    uint64_t chain_gas_used = 0;

private:
    evm::GasSchedule g_;

    struct Ctx;
    struct CallOut;
    CallOut run_frame(Ctx& c, const Address& contract, const Address& caller,
                      const Word256& value, const Bytes& input, const Bytes& code, bool writable,
                      uint64_t depth, uint64_t gas, bool is_create);
};

}  // namespace fpvm::test

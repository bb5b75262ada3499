// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <optional>
#include <set>

#include "fpvm/keccak.hpp"
#include "fpvm/rlp.hpp"
#include "fpvm/word256.hpp"

namespace fpvm::evm {

struct Account {
    uint64_t nonce = 0;
    Word256 balance = 0;
    Hash32 storage_root = EMPTY_TRIE_ROOT;
    Hash32 code_hash = EMPTY_KECCAK;

    bool operator==(const Account&) const = default;
    bool has_code() const { return code_hash != EMPTY_KECCAK; }
    bool is_empty() const {
        return nonce == 0 && balance == 0 && code_hash == EMPTY_KECCAK;
    }

    Bytes rlp() const;
    static std::optional<Account> from_rlp(BytesView encoded);
};

// Transactions carry an explicit, pre-authenticated sender; signature
// recovery is the sequencer's problem, not this system's.
struct Transaction {
    Address sender;
    std::optional<Address> to;  // absent: contract creation
    Word256 value = 0;
    uint64_t gas_limit = 0;
    Word256 gas_price = 0;
    uint64_t nonce = 0;
    Bytes data;

    bool operator==(const Transaction&) const = default;
    bool is_create() const { return !to.has_value(); }

    Bytes rlp() const;
    static std::optional<Transaction> from_rlp(BytesView encoded);
};

struct BlockContext {
    uint64_t number = 0;
    uint64_t timestamp = 0;
    Address coinbase;
    uint64_t gas_limit = 0;
    Word256 base_fee = 0;

    bool operator==(const BlockContext&) const = default;
};

struct LogEntry {
    Address address;
    std::vector<Hash32> topics;
    Bytes data;

    bool operator==(const LogEntry&) const = default;
    Bytes rlp() const;
};

struct Receipt {
    uint8_t status = 0;
    uint64_t cumulative_gas = 0;
    Hash32 log_head;  // hash chain over the transaction's logs; zero on failure

    bool operator==(const Receipt&) const = default;
    Bytes rlp() const;
    static std::optional<Receipt> from_rlp(BytesView encoded);
};

// keccak256(rlp([sender, nonce]))[12:], the standard CREATE address.
Address create_address(const Address& sender, uint64_t nonce);
// keccak256(0xff || sender || salt || keccak(initcode))[12:] for CREATE2.
Address create2_address(const Address& sender, const Word256& salt, const Hash32& initcode_hash);

// Trie keys: accounts and storage use the keccak-hashed (secure) convention;
// transaction and receipt tries are keyed by rlp(index).
inline Bytes account_trie_key(const Address& a) {
    auto h = keccak256(BytesView(a.bytes));
    return Bytes(h.bytes.begin(), h.bytes.end());
}
inline Bytes storage_trie_key(const Word256& slot) {
    auto b = w256_bytes(slot);
    auto h = keccak256(BytesView(b));
    return Bytes(h.bytes.begin(), h.bytes.end());
}
inline Bytes index_trie_key(uint64_t index) { return rlp::encode_uint(index); }

// Storage values are minimal big-endian integers wrapped in RLP; zero
// deletes the slot.
Bytes storage_value_rlp(const Word256& value);
std::optional<Word256> storage_value_from_rlp(BytesView encoded);

// Access-list trie entries: key is the 20-byte address, value the RLP list
// of the accessed slot keys as sorted 32-byte words.
Bytes access_entry_rlp(const std::set<Word256>& slots);
std::optional<std::set<Word256>> access_entry_slots(BytesView encoded);

}  // namespace fpvm::evm

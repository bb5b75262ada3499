// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#include "fpvm/evm/world.hpp"

namespace fpvm::evm {

Bytes Account::rlp() const {
    return rlp::encode(rlp::Item::of({
        rlp::Item::uint(nonce),
        rlp::Item::uint(balance),
        rlp::Item::string(BytesView(storage_root.bytes)),
        rlp::Item::string(BytesView(code_hash.bytes)),
    }));
}

std::optional<Account> Account::from_rlp(BytesView encoded) {
    auto item = rlp::decode(encoded);
    if (!item || !item->is_list() || item->list.size() != 4) return std::nullopt;
    Account acct;
    auto nonce = rlp::as_uint64(item->list[0]);
    auto balance = rlp::as_word256(item->list[1]);
    if (!nonce || !balance) return std::nullopt;
    if (item->list[2].str.size() != 32 || item->list[3].str.size() != 32) return std::nullopt;
    acct.nonce = *nonce;
    acct.balance = *balance;
    acct.storage_root = hash32_from_bytes(item->list[2].str);
    acct.code_hash = hash32_from_bytes(item->list[3].str);
    return acct;
}

Bytes Transaction::rlp() const {
    return rlp::encode(rlp::Item::of({
        rlp::Item::uint(nonce),
        rlp::Item::uint(gas_price),
        rlp::Item::uint(gas_limit),
        to ? rlp::Item::string(BytesView(to->bytes)) : rlp::Item::string(Bytes{}),
        rlp::Item::uint(value),
        rlp::Item::string(data),
        rlp::Item::string(BytesView(sender.bytes)),
    }));
}

std::optional<Transaction> Transaction::from_rlp(BytesView encoded) {
    auto item = rlp::decode(encoded);
    if (!item || !item->is_list() || item->list.size() != 7) return std::nullopt;
    for (const auto& f : item->list)
        if (!f.is_string()) return std::nullopt;
    Transaction tx;
    auto nonce = rlp::as_uint64(item->list[0]);
    auto price = rlp::as_word256(item->list[1]);
    auto gas = rlp::as_uint64(item->list[2]);
    auto value = rlp::as_word256(item->list[4]);
    if (!nonce || !price || !gas || !value) return std::nullopt;
    tx.nonce = *nonce;
    tx.gas_price = *price;
    tx.gas_limit = *gas;
    tx.value = *value;
    if (!item->list[3].str.empty()) {
        if (item->list[3].str.size() != 20) return std::nullopt;
        tx.to = address_from_bytes(item->list[3].str);
    }
    tx.data = item->list[5].str;
    if (item->list[6].str.size() != 20) return std::nullopt;
    tx.sender = address_from_bytes(item->list[6].str);
    return tx;
}

Bytes LogEntry::rlp() const {
    std::vector<rlp::Item> topic_items;
    topic_items.reserve(topics.size());
    for (const Hash32& t : topics) topic_items.push_back(rlp::Item::string(BytesView(t.bytes)));
    return rlp::encode(rlp::Item::of({
        rlp::Item::string(BytesView(address.bytes)),
        rlp::Item::of(std::move(topic_items)),
        rlp::Item::string(data),
    }));
}

Bytes Receipt::rlp() const {
    return rlp::encode(rlp::Item::of({
        rlp::Item::uint(static_cast<uint64_t>(status)),
        rlp::Item::uint(cumulative_gas),
        rlp::Item::string(BytesView(log_head.bytes)),
    }));
}

std::optional<Receipt> Receipt::from_rlp(BytesView encoded) {
    auto item = rlp::decode(encoded);
    if (!item || !item->is_list() || item->list.size() != 3) return std::nullopt;
    Receipt r;
    auto status = rlp::as_uint64(item->list[0]);
    auto gas = rlp::as_uint64(item->list[1]);
    if (!status || *status > 1 || !gas) return std::nullopt;
    if (item->list[2].str.size() != 32) return std::nullopt;
    r.status = static_cast<uint8_t>(*status);
    r.cumulative_gas = *gas;
    r.log_head = hash32_from_bytes(item->list[2].str);
    return r;
}

Address create_address(const Address& sender, uint64_t nonce) {
    Bytes encoded = rlp::encode(rlp::Item::of({
        rlp::Item::string(BytesView(sender.bytes)),
        rlp::Item::uint(nonce),
    }));
    Hash32 h = keccak256(encoded);
    Address out;
    std::memcpy(out.data(), h.data() + 12, 20);
    return out;
}

Address create2_address(const Address& sender, const Word256& salt, const Hash32& initcode_hash) {
    Keccak256 hasher;
    hasher.update_u8(0xff);
    hasher.update(sender);
    hasher.update(BytesView(w256_bytes(salt)));
    hasher.update(initcode_hash);
    Hash32 h = hasher.final();
    Address out;
    std::memcpy(out.data(), h.data() + 12, 20);
    return out;
}

Bytes storage_value_rlp(const Word256& value) { return rlp::encode(rlp::Item::uint(value)); }

Bytes access_entry_rlp(const std::set<Word256>& slots) {
    std::vector<rlp::Item> items;
    items.reserve(slots.size());
    for (const Word256& s : slots) items.push_back(rlp::Item::string(BytesView(w256_bytes(s))));
    return rlp::encode(rlp::Item::of(std::move(items)));
}

std::optional<std::set<Word256>> access_entry_slots(BytesView encoded) {
    auto item = rlp::decode(encoded);
    if (!item || !item->is_list()) return std::nullopt;
    std::set<Word256> out;
    for (const auto& child : item->list) {
        if (!child.is_string() || child.str.size() != 32) return std::nullopt;
        out.insert(w256_from_bytes(child.str));
    }
    return out;
}

std::optional<Word256> storage_value_from_rlp(BytesView encoded) {
    auto item = rlp::decode(encoded);
    if (!item) return std::nullopt;
    return rlp::as_word256(*item);
}

WorldState::WorldState()
    : store_(std::make_shared<MptStore>()),
      accounts_(store_, EMPTY_TRIE_ROOT),
      codes_(std::make_shared<std::map<Hash32, Bytes>>()) {}

std::optional<Account> WorldState::account(const Address& address) const {
    auto raw = accounts_.get(account_trie_key(address));
    if (!raw) return std::nullopt;
    return Account::from_rlp(*raw);
}

std::optional<Account> WorldState::account_at_root(const Hash32& world_root,
                                                   const Address& address) const {
    auto raw = mpt_get(*store_, world_root, account_trie_key(address));
    if (!raw) return std::nullopt;
    return Account::from_rlp(*raw);
}

void WorldState::put_account(const Address& address, const Account& account) {
    accounts_ = accounts_.update(account_trie_key(address), BytesView(account.rlp()));
}

void WorldState::delete_account(const Address& address) {
    accounts_ = accounts_.update(account_trie_key(address), std::nullopt);
}

Word256 WorldState::storage(const Address& address, const Word256& slot) const {
    return storage_at_root(accounts_.root(), address, slot);
}

Word256 WorldState::storage_at_root(const Hash32& world_root, const Address& address,
                                    const Word256& slot) const {
    auto acct = account_at_root(world_root, address);
    if (!acct) return 0;
    auto raw = mpt_get(*store_, acct->storage_root, storage_trie_key(slot));
    if (!raw) return 0;
    auto value = storage_value_from_rlp(*raw);
    return value ? *value : 0;
}

void WorldState::set_storage(const Address& address, const Word256& slot, const Word256& value) {
    auto acct = account(address);
    if (!acct) throw std::logic_error("set_storage on missing account");
    Mpt storage_trie(store_, acct->storage_root);
    Bytes key = storage_trie_key(slot);
    if (value == 0) {
        storage_trie = storage_trie.update(key, std::nullopt);
    } else {
        storage_trie = storage_trie.update(key, BytesView(storage_value_rlp(value)));
    }
    acct->storage_root = storage_trie.root();
    put_account(address, *acct);
}

Bytes WorldState::code(const Hash32& code_hash) const {
    if (code_hash == EMPTY_KECCAK) return {};
    auto it = codes_->find(code_hash);
    if (it == codes_->end()) throw std::logic_error("missing code blob");
    return it->second;
}

Hash32 WorldState::put_code(Bytes code) {
    Hash32 h = keccak256(code);
    codes_->emplace(h, std::move(code));
    return h;
}

bool WorldState::transfer(const Address& from, const Address& to, const Word256& amount) {
    auto sender = account(from);
    if (!sender || sender->balance < amount) return false;
    sender->balance -= amount;
    put_account(from, *sender);
    credit(to, amount);
    return true;
}

void WorldState::credit(const Address& address, const Word256& amount) {
    auto existing = account(address);
    if (!existing && amount == 0) return;  // a zero credit creates nothing
    Account acct = existing.value_or(Account{});
    acct.balance += amount;
    put_account(address, acct);
}

}  // namespace fpvm::evm

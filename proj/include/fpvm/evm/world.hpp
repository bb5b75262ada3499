// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <map>

#include "fpvm/commit/mpt.hpp"
#include "fpvm/evm/types.hpp"

namespace fpvm::evm {

// Address -> account map authenticated by an MPT, with per-account storage
// tries rooted at each account's storageRoot and living in the same shared
// node store. Copying a WorldState is a cheap snapshot: both copies share
// the append-only stores, so reverting is plain assignment.
class WorldState {
public:
    WorldState();

    const Hash32& root() const { return accounts_.root(); }
    const Mpt& accounts() const { return accounts_; }
    const std::shared_ptr<MptStore>& store() const { return store_; }

    std::optional<Account> account(const Address& address) const;
    void put_account(const Address& address, const Account& account);
    void delete_account(const Address& address);

    Word256 storage(const Address& address, const Word256& slot) const;
    // Updates the slot and the owning account's storageRoot in one step,
    // keeping the root coherent at every observation point. The account
    // must exist.
    void set_storage(const Address& address, const Word256& slot, const Word256& value);

    // Storage read against an explicit account state (used for
    // committed-state lookups on a historical root).
    Word256 storage_at_root(const Hash32& world_root, const Address& address,
                            const Word256& slot) const;
    std::optional<Account> account_at_root(const Hash32& world_root,
                                           const Address& address) const;

    Bytes code(const Hash32& code_hash) const;
    Hash32 put_code(Bytes code);
    std::shared_ptr<const std::map<Hash32, Bytes>> codes() const { return codes_; }

    // Value transfer helper; creates the recipient if missing. Returns false
    // (and changes nothing) when the sender balance is insufficient.
    bool transfer(const Address& from, const Address& to, const Word256& amount);

    void credit(const Address& address, const Word256& amount);

private:
    std::shared_ptr<MptStore> store_;
    Mpt accounts_;
    std::shared_ptr<std::map<Hash32, Bytes>> codes_;
};

}  // namespace fpvm::evm

// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#include "support/reference_evm.hpp"

#include "fpvm/commit/hash_chain.hpp"
#include "fpvm/evm/interpreter.hpp"

namespace fpvm::test {

using namespace fpvm::evm;

namespace {

uint64_t u64(const Word256& w) { return w256_to_u64_saturated(w); }

}  // namespace

struct RefEvm::Ctx {
    RefEvm& self;
    const BlockContext& block;
    const Transaction& tx;
    std::map<Address, RefAccount> tx_start;  // committed state for SSTORE pricing  // committed state for SSTORE pricing
    HashChain logs;
    HashChain destruct_chain;
    std::vector<Address> destructs;
    std::set<Address> destruct_set;
    int64_t refund = 0;
    std::set<Address> warm_accounts;
    std::set<std::pair<Address, Word256>> warm_slots;
};

struct RefEvm::CallOut {
    int status;  // 1 success, 0 revert, -1 exceptional
    uint64_t gas_left = 0;
    Bytes ret;
};

std::vector<RefTxSummary> RefEvm::execute_block(const BlockContext& ctx,
                                                const std::vector<Transaction>& txs) {
    std::vector<RefTxSummary> out;
    uint64_t block_gas = 0;

    for (const Transaction& tx : txs) {
        RefTxSummary summary;

        // Validity screen, mirroring the documented skip rules.
        RefAccount sender = accounts.count(tx.sender) ? accounts[tx.sender] : RefAccount{};
        bool valid = tx.nonce == sender.nonce &&
                     Word512(tx.gas_price) * tx.gas_limit + Word512(tx.value) <=
                         Word512(sender.balance) &&
                     tx.gas_limit >= g_.intrinsic_cost(tx.data, tx.is_create());
        if (valid && tx.is_create()) {
            Address target = create_address(tx.sender, tx.nonce);
            auto it = accounts.find(target);
            if (it != accounts.end() && (it->second.nonce != 0 || !it->second.code.empty()))
                valid = false;
        }
        if (!valid) {
            summary.skipped = true;
            out.push_back(summary);
            continue;
        }

        bool regular = !tx.is_create() && (!accounts.count(*tx.to) || accounts[*tx.to].code.empty());
        if (regular) {
            uint64_t used = g_.intrinsic_cost(tx.data, false);
            accounts[tx.sender].nonce += 1;
            accounts[tx.sender].balance -= Word256(tx.gas_price) * used + tx.value;
            if (tx.value != 0 || accounts.count(*tx.to)) accounts[*tx.to].balance += tx.value;
            if (tx.gas_price != 0) accounts[ctx.coinbase].balance += Word256(tx.gas_price) * used;
            summary.status = 1;
            summary.gas_used = used;
            summary.log_head = ZERO_HASH;
            block_gas += used;
            out.push_back(summary);
            continue;
        }

        Ctx c{*this, ctx, tx, accounts, {}, {}, {}, {}, 0, {}, {}};
        c.warm_accounts.insert(tx.sender);

        accounts[tx.sender].nonce += 1;
        accounts[tx.sender].balance -= Word256(tx.gas_price) * tx.gas_limit;

        uint64_t intrinsic = g_.intrinsic_cost(tx.data, tx.is_create());
        uint64_t start_gas = tx.gas_limit - intrinsic;

        Address target;
        Bytes code;
        bool is_create = tx.is_create();
        if (is_create) {
            target = create_address(tx.sender, tx.nonce);
            c.warm_accounts.insert(target);
            RefAccount fresh = accounts.count(target) ? accounts[target] : RefAccount{};
            fresh.nonce = 1;
            fresh.code.clear();
            fresh.storage.clear();
            accounts[target] = fresh;
            code = tx.data;
        } else {
            target = *tx.to;
            c.warm_accounts.insert(target);
            code = accounts[target].code;
        }

        auto checkpoint = accounts;
        auto logs_checkpoint = c.logs;
        if (tx.value != 0) {
            accounts[tx.sender].balance -= tx.value;
            accounts[target].balance += tx.value;
        }

        CallOut res = run_frame(c, target, tx.sender, tx.value,
                                is_create ? Bytes{} : tx.data, code, true, 1, start_gas,
                                is_create);

        if (res.status == 1 && is_create) {
            uint64_t deposit = g_.code_deposit_byte_cost * res.ret.size();
            if (res.ret.size() > g_.max_code_size || deposit > res.gas_left) res.status = -1;
            else {
                res.gas_left -= deposit;
                accounts[target].code = res.ret;
            }
        }
        if (res.status != 1) {
            accounts = checkpoint;
            c.logs = logs_checkpoint;
            c.refund = 0;
            c.destructs.clear();
        }
        uint64_t gas_left = res.status == -1 ? 0 : res.gas_left;
        uint64_t refundable = std::min<uint64_t>(
            static_cast<uint64_t>(std::max<int64_t>(c.refund, 0)),
            (tx.gas_limit - gas_left) / g_.refund_quotient);
        uint64_t used = tx.gas_limit - gas_left - refundable;

        accounts[tx.sender].balance += Word256(tx.gas_price) * (tx.gas_limit - used);
        if (tx.gas_price != 0) accounts[ctx.coinbase].balance += Word256(tx.gas_price) * used;
        if (res.status == 1)
            for (const Address& a : c.destructs) accounts.erase(a);

        summary.status = res.status == 1 ? 1 : 0;
        summary.gas_used = used;
        summary.log_head = res.status == 1 ? c.logs.head : ZERO_HASH;
        summary.return_data = is_create ? Bytes{} : res.ret;
        block_gas += used;
        out.push_back(summary);
    }

    // Record this block's hash the same way the chain does.
    Hash32 world_marker{};  // reference has no trie; block hash bookkeeping is separate
    (void)world_marker;
    chain_gas_used += block_gas;
    return out;
}

RefEvm::CallOut RefEvm::run_frame(Ctx& c, const Address& contract, const Address& caller,
                                  const Word256& value, const Bytes& input, const Bytes& code,
                                  bool writable, uint64_t depth, uint64_t gas, bool is_create) {
    std::vector<Word256> st;
    Bytes mem;
    Bytes retdata;
    uint64_t pc = 0;

    auto words = [&] { return mem.size() / 32; };
    auto grow = [&](uint64_t target_words) {
        if (target_words * 32 > mem.size()) mem.resize(target_words * 32, 0);
    };
    auto mslice = [&](uint64_t off, uint64_t n) {
        Bytes b(n, 0);
        for (uint64_t i = 0; i < n && off + i < mem.size(); ++i) b[i] = mem[off + i];
        return b;
    };
    auto exceptional = [&]() -> CallOut { return {-1, 0, {}}; };

    std::vector<bool> dests(code.size(), false);
    for (size_t i = 0; i < code.size(); ++i) {
        if (code[i] == OP_JUMPDEST) dests[i] = true;
        if (is_push(code[i])) i += code[i] - OP_PUSH1 + 1;
    }

    while (true) {
        uint8_t op = pc < code.size() ? code[pc] : uint8_t{OP_STOP};
        const auto& info = opcode_info(op);
        if (!info.supported || op == OP_INVALID) return exceptional();
        if (st.size() < info.delta) return exceptional();
        if (st.size() - info.delta + info.alpha > g_.stack_limit) return exceptional();
        auto peek = [&](size_t i) -> const Word256& { return st[st.size() - 1 - i]; };
        if (!writable && (is_write_op(op) || (op == OP_CALL && peek(2) != 0)))
            return exceptional();

        uint64_t cost = g_.base_cost[op];
        uint64_t target_words = words();
        auto span_words = [&](uint64_t off, uint64_t n) {
            return std::max(words(), words_to_cover(off, n));
        };
        switch (op) {
            case OP_EXP: cost += g_.exp_byte_cost * w256_byte_length(peek(1)); break;
            case OP_KECCAK256:
                cost += g_.keccak_word_cost * ((u64(peek(1)) + 31) / 32);
                target_words = span_words(u64(peek(0)), u64(peek(1)));
                break;
            case OP_CALLDATACOPY:
            case OP_CODECOPY:
            case OP_RETURNDATACOPY:
                cost += g_.copy_cost(u64(peek(2)));
                target_words = span_words(u64(peek(0)), u64(peek(2)));
                break;
            case OP_EXTCODECOPY:
                cost += g_.copy_cost(u64(peek(3)));
                target_words = span_words(u64(peek(1)), u64(peek(3)));
                cost += c.warm_accounts.count(w256_to_address(peek(0))) ? g_.warm_access_cost
                                                                        : g_.cold_account_cost;
                break;
            case OP_BALANCE:
            case OP_EXTCODESIZE:
            case OP_EXTCODEHASH:
                cost += c.warm_accounts.count(w256_to_address(peek(0))) ? g_.warm_access_cost
                                                                        : g_.cold_account_cost;
                break;
            case OP_MLOAD:
            case OP_MSTORE: target_words = span_words(u64(peek(0)), 32); break;
            case OP_MSTORE8: target_words = span_words(u64(peek(0)), 1); break;
            case OP_SLOAD:
                cost += c.warm_slots.count({contract, peek(0)}) ? g_.warm_access_cost
                                                                : g_.cold_sload_cost;
                break;
            case OP_SSTORE: {
                Word256 slot = peek(0), next = peek(1);
                Word256 cur = accounts[contract].storage.count(slot)
                                  ? accounts[contract].storage[slot]
                                  : 0;
                Word256 orig = 0;
                if (auto it = c.tx_start.find(contract); it != c.tx_start.end())
                    if (auto s = it->second.storage.find(slot); s != it->second.storage.end())
                        orig = s->second;
                if (!c.warm_slots.count({contract, slot})) cost += g_.cold_sload_cost;
                if (cur == next) cost += g_.warm_access_cost;
                else if (orig == cur)
                    cost += orig == 0 ? g_.sstore_set_cost : g_.sstore_reset_cost;
                else cost += g_.warm_access_cost;
                break;
            }
            case OP_RETURN:
            case OP_REVERT: target_words = span_words(u64(peek(0)), u64(peek(1))); break;
            case OP_CALL:
            case OP_CALLCODE: {
                uint64_t in = u64(peek(3)), insz = u64(peek(4));
                uint64_t outo = u64(peek(5)), outsz = u64(peek(6));
                target_words = std::max(span_words(in, insz), span_words(outo, outsz));
                cost += c.warm_accounts.count(w256_to_address(peek(1))) ? g_.warm_access_cost
                                                                        : g_.cold_account_cost;
                if (peek(2) != 0) {
                    cost += g_.call_value_cost;
                    if (op == OP_CALL && !accounts.count(w256_to_address(peek(1))))
                        cost += g_.new_account_cost;
                }
                break;
            }
            case OP_DELEGATECALL:
            case OP_STATICCALL: {
                uint64_t in = u64(peek(2)), insz = u64(peek(3));
                uint64_t outo = u64(peek(4)), outsz = u64(peek(5));
                target_words = std::max(span_words(in, insz), span_words(outo, outsz));
                cost += c.warm_accounts.count(w256_to_address(peek(1))) ? g_.warm_access_cost
                                                                        : g_.cold_account_cost;
                break;
            }
            case OP_CREATE: target_words = span_words(u64(peek(1)), u64(peek(2))); break;
            case OP_CREATE2:
                cost += g_.keccak_word_cost * ((u64(peek(2)) + 31) / 32);
                target_words = span_words(u64(peek(1)), u64(peek(2)));
                break;
            case OP_SELFDESTRUCT: {
                Address b = w256_to_address(peek(0));
                if (!c.warm_accounts.count(b)) cost += g_.cold_account_cost;
                if (!accounts.count(b) && accounts[contract].balance > 0)
                    cost += g_.new_account_cost;
                break;
            }
            default:
                if (is_log(op)) {
                    cost += g_.log_topic_cost * (op - OP_LOG0);
                    cost += g_.log_data_byte_cost * u64(peek(1));
                    target_words = span_words(u64(peek(0)), u64(peek(1)));
                }
                break;
        }
        cost += g_.memory_expansion_cost(words(), target_words);
        if (cost > gas) return exceptional();
        gas -= cost;
        grow(target_words);

        auto pop = [&] {
            Word256 v = st.back();
            st.pop_back();
            return v;
        };

        switch (op) {
            case OP_STOP: return {1, gas, {}};
            case OP_ADD: { auto a = pop(), b = pop(); st.push_back(a + b); break; }
            case OP_MUL: { auto a = pop(), b = pop(); st.push_back(a * b); break; }
            case OP_SUB: { auto a = pop(), b = pop(); st.push_back(a - b); break; }
            case OP_DIV: { auto a = pop(), b = pop(); st.push_back(w256_div(a, b)); break; }
            case OP_SDIV: { auto a = pop(), b = pop(); st.push_back(w256_sdiv(a, b)); break; }
            case OP_MOD: { auto a = pop(), b = pop(); st.push_back(w256_mod(a, b)); break; }
            case OP_SMOD: { auto a = pop(), b = pop(); st.push_back(w256_smod(a, b)); break; }
            case OP_ADDMOD: { auto a = pop(), b = pop(), n = pop(); st.push_back(w256_addmod(a, b, n)); break; }
            case OP_MULMOD: { auto a = pop(), b = pop(), n = pop(); st.push_back(w256_mulmod(a, b, n)); break; }
            case OP_EXP: { auto a = pop(), b = pop(); st.push_back(w256_exp(a, b)); break; }
            case OP_SIGNEXTEND: { auto a = pop(), b = pop(); st.push_back(w256_signextend(a, b)); break; }
            case OP_LT: { auto a = pop(), b = pop(); st.push_back(a < b ? 1 : 0); break; }
            case OP_GT: { auto a = pop(), b = pop(); st.push_back(a > b ? 1 : 0); break; }
            case OP_SLT: { auto a = pop(), b = pop(); st.push_back(w256_slt(a, b) ? 1 : 0); break; }
            case OP_SGT: { auto a = pop(), b = pop(); st.push_back(w256_slt(b, a) ? 1 : 0); break; }
            case OP_EQ: { auto a = pop(), b = pop(); st.push_back(a == b ? 1 : 0); break; }
            case OP_ISZERO: st.back() = st.back() == 0 ? 1 : 0; break;
            case OP_AND: { auto a = pop(), b = pop(); st.push_back(a & b); break; }
            case OP_OR: { auto a = pop(), b = pop(); st.push_back(a | b); break; }
            case OP_XOR: { auto a = pop(), b = pop(); st.push_back(a ^ b); break; }
            case OP_NOT: st.back() = ~st.back(); break;
            case OP_BYTE: { auto i = pop(), v = pop(); st.push_back(w256_byte(i, v)); break; }
            case OP_SHL: { auto s = pop(), v = pop(); st.push_back(w256_shl(s, v)); break; }
            case OP_SHR: { auto s = pop(), v = pop(); st.push_back(w256_shr(s, v)); break; }
            case OP_SAR: { auto s = pop(), v = pop(); st.push_back(w256_sar(s, v)); break; }
            case OP_KECCAK256: {
                uint64_t off = u64(pop()), n = u64(pop());
                st.push_back(w256_from_hash(keccak256(mslice(off, n))));
                break;
            }
            case OP_ADDRESS: st.push_back(w256_from_address(contract)); break;
            case OP_BALANCE: {
                Address a = w256_to_address(pop());
                c.warm_accounts.insert(a);
                st.push_back(accounts.count(a) ? accounts[a].balance : 0);
                break;
            }
            case OP_ORIGIN: st.push_back(w256_from_address(c.tx.sender)); break;
            case OP_CALLER: st.push_back(w256_from_address(caller)); break;
            case OP_CALLVALUE: st.push_back(value); break;
            case OP_CALLDATALOAD: {
                uint64_t off = u64(pop());
                Bytes w(32, 0);
                for (int i = 0; i < 32; ++i)
                    if (off + i < input.size()) w[i] = input[off + i];
                st.push_back(w256_from_bytes(w));
                break;
            }
            case OP_CALLDATASIZE: st.push_back(input.size()); break;
            case OP_CALLDATACOPY: {
                uint64_t dst = u64(pop()), src = u64(pop()), n = u64(pop());
                for (uint64_t i = 0; i < n; ++i)
                    mem[dst + i] = src + i < input.size() ? input[src + i] : 0;
                break;
            }
            case OP_CODESIZE: st.push_back(code.size()); break;
            case OP_CODECOPY: {
                uint64_t dst = u64(pop()), src = u64(pop()), n = u64(pop());
                for (uint64_t i = 0; i < n; ++i)
                    mem[dst + i] = src + i < code.size() ? code[src + i] : 0;
                break;
            }
            case OP_GASPRICE: st.push_back(c.tx.gas_price); break;
            case OP_EXTCODESIZE: {
                Address a = w256_to_address(pop());
                c.warm_accounts.insert(a);
                st.push_back(accounts.count(a) ? accounts[a].code.size() : 0);
                break;
            }
            case OP_EXTCODECOPY: {
                Address a = w256_to_address(pop());
                uint64_t dst = u64(pop()), src = u64(pop()), n = u64(pop());
                c.warm_accounts.insert(a);
                Bytes ext = accounts.count(a) ? accounts[a].code : Bytes{};
                for (uint64_t i = 0; i < n; ++i)
                    mem[dst + i] = src + i < ext.size() ? ext[src + i] : 0;
                break;
            }
            case OP_RETURNDATASIZE: st.push_back(retdata.size()); break;
            case OP_RETURNDATACOPY: {
                uint64_t dst = u64(pop());
                Word256 src = pop(), n = pop();
                if (Word512(src) + Word512(n) > retdata.size()) return exceptional();
                for (uint64_t i = 0; i < u64(n); ++i) mem[dst + i] = retdata[u64(src) + i];
                break;
            }
            case OP_EXTCODEHASH: {
                Address a = w256_to_address(pop());
                c.warm_accounts.insert(a);
                if (!accounts.count(a)) st.push_back(0);
                else st.push_back(w256_from_hash(keccak256(accounts[a].code)));
                break;
            }
            case OP_BLOCKHASH: {
                Word256 n = pop();
                if (n < c.block.number && Word256(c.block.number) - n <= 256 &&
                    c.self.recent_block_hashes.count(u64(n)))
                    st.push_back(w256_from_hash(c.self.recent_block_hashes[u64(n)]));
                else st.push_back(0);
                break;
            }
            case OP_COINBASE: st.push_back(w256_from_address(c.block.coinbase)); break;
            case OP_TIMESTAMP: st.push_back(c.block.timestamp); break;
            case OP_NUMBER: st.push_back(c.block.number); break;
            case OP_GASLIMIT: st.push_back(c.block.gas_limit); break;
            case OP_SELFBALANCE:
                st.push_back(accounts.count(contract) ? accounts[contract].balance : 0);
                break;
            case OP_BASEFEE: st.push_back(c.block.base_fee); break;
            case OP_POP: pop(); break;
            case OP_MLOAD: {
                uint64_t off = u64(pop());
                st.push_back(w256_from_bytes(mslice(off, 32)));
                break;
            }
            case OP_MSTORE: {
                uint64_t off = u64(pop());
                auto w = w256_bytes(pop());
                std::copy(w.begin(), w.end(), mem.begin() + off);
                break;
            }
            case OP_MSTORE8: {
                uint64_t off = u64(pop());
                mem[off] = static_cast<uint8_t>(pop() & 0xff);
                break;
            }
            case OP_SLOAD: {
                Word256 slot = pop();
                c.warm_slots.insert({contract, slot});
                auto& s = accounts[contract].storage;
                st.push_back(s.count(slot) ? s[slot] : 0);
                break;
            }
            case OP_SSTORE: {
                Word256 slot = pop(), next = pop();
                auto& s = accounts[contract].storage;
                Word256 cur = s.count(slot) ? s[slot] : 0;
                Word256 orig = 0;
                if (auto it = c.tx_start.find(contract); it != c.tx_start.end())
                    if (auto e = it->second.storage.find(slot); e != it->second.storage.end())
                        orig = e->second;
                c.warm_slots.insert({contract, slot});
                if (cur != next) {
                    int64_t clear = static_cast<int64_t>(g_.sstore_clear_refund);
                    if (orig == cur) {
                        if (orig != 0 && next == 0) c.refund += clear;
                    } else {
                        if (orig != 0) {
                            if (cur == 0) c.refund -= clear;
                            else if (next == 0) c.refund += clear;
                        }
                        if (next == orig)
                            c.refund += orig == 0 ? static_cast<int64_t>(g_.sstore_set_cost -
                                                                         g_.warm_access_cost)
                                                  : static_cast<int64_t>(g_.sstore_reset_cost -
                                                                         g_.warm_access_cost);
                    }
                    if (next == 0) s.erase(slot);
                    else s[slot] = next;
                }
                break;
            }
            case OP_JUMP: {
                uint64_t t = u64(pop());
                if (t >= code.size() || !dests[t]) return exceptional();
                pc = t;
                continue;
            }
            case OP_JUMPI: {
                uint64_t t = u64(pop());
                Word256 cond = pop();
                if (cond != 0) {
                    if (t >= code.size() || !dests[t]) return exceptional();
                    pc = t;
                    continue;
                }
                break;
            }
            case OP_PC: st.push_back(pc); break;
            case OP_MSIZE: st.push_back(mem.size()); break;
            case OP_GAS: st.push_back(gas); break;
            case OP_JUMPDEST: break;
            case OP_RETURN: {
                uint64_t off = u64(pop()), n = u64(pop());
                return {1, gas, mslice(off, n)};
            }
            case OP_REVERT: {
                uint64_t off = u64(pop()), n = u64(pop());
                return {0, gas, mslice(off, n)};
            }
            case OP_SELFDESTRUCT: {
                Address beneficiary = w256_to_address(pop());
                c.warm_accounts.insert(beneficiary);
                Word256 bal = accounts[contract].balance;
                if (bal != 0 || accounts.count(beneficiary)) accounts[beneficiary].balance += bal;
                accounts[contract].balance = 0;  // burned when beneficiary == self
                if (!c.destruct_set.count(contract)) {
                    c.destruct_set.insert(contract);
                    c.destructs.push_back(contract);
                    c.destruct_chain.append(BytesView(contract.bytes));
                }
                return {1, gas, {}};
            }
            case OP_CREATE:
            case OP_CREATE2: {
                Word256 val = pop();
                uint64_t off = u64(pop()), n = u64(pop());
                Word256 salt = op == OP_CREATE2 ? pop() : Word256(0);
                Bytes init = mslice(off, n);
                uint64_t fwd = g_.forwarded_gas(gas, gas);
                gas -= fwd;
                if (depth >= g_.call_depth_limit || accounts[contract].balance < val) {
                    gas += fwd;
                    retdata.clear();
                    st.push_back(0);
                    break;
                }
                uint64_t creation_nonce = accounts[contract].nonce;
                accounts[contract].nonce += 1;
                Address na = op == OP_CREATE ? create_address(contract, creation_nonce)
                                             : create2_address(contract, salt, keccak256(init));
                c.warm_accounts.insert(na);
                if (accounts.count(na) &&
                    (accounts[na].nonce != 0 || !accounts[na].code.empty())) {
                    retdata.clear();
                    st.push_back(0);
                    break;
                }
                auto snapshot = accounts;
                auto logs_snapshot = c.logs;
                auto refund_snapshot = c.refund;
                auto warm_a = c.warm_accounts;
                auto warm_s = c.warm_slots;
                auto d_list = c.destructs;
                auto d_set = c.destruct_set;
                auto d_chain = c.destruct_chain;
                RefAccount fresh = accounts.count(na) ? accounts[na] : RefAccount{};
                fresh.nonce = 1;
                fresh.code.clear();
                fresh.storage.clear();
                accounts[na] = fresh;
                if (val != 0) {
                    accounts[contract].balance -= val;
                    accounts[na].balance += val;
                }
                CallOut r = run_frame(c, na, contract, val, {}, init, writable, depth + 1, fwd,
                                      true);
                if (r.status == 1) {
                    uint64_t deposit = g_.code_deposit_byte_cost * r.ret.size();
                    if (r.ret.size() > g_.max_code_size || deposit > r.gas_left) r.status = -1;
                    else {
                        r.gas_left -= deposit;
                        accounts[na].code = r.ret;
                    }
                }
                if (r.status != 1) {
                    accounts = snapshot;
                    c.logs = logs_snapshot;
                    c.refund = refund_snapshot;
                    c.warm_accounts = warm_a;
                    c.warm_slots = warm_s;
                    c.destructs = d_list;
                    c.destruct_set = d_set;
                    c.destruct_chain = d_chain;
                }
                gas += r.status == -1 ? 0 : r.gas_left;
                retdata = r.status == 0 ? r.ret : Bytes{};
                st.push_back(r.status == 1 ? w256_from_address(na) : Word256(0));
                break;
            }
            case OP_CALL:
            case OP_CALLCODE:
            case OP_DELEGATECALL:
            case OP_STATICCALL: {
                uint64_t req = u64(pop());
                Address to = w256_to_address(pop());
                Word256 val = (op == OP_CALL || op == OP_CALLCODE) ? pop() : Word256(0);
                uint64_t in = u64(pop()), insz = u64(pop());
                uint64_t outo = u64(pop()), outsz = u64(pop());
                c.warm_accounts.insert(to);
                uint64_t fwd = g_.forwarded_gas(req, gas);
                gas -= fwd;
                bool need_bal = (op == OP_CALL || op == OP_CALLCODE) && val != 0;
                if (depth >= g_.call_depth_limit ||
                    (need_bal && accounts[contract].balance < val)) {
                    gas += fwd;
                    retdata.clear();
                    st.push_back(0);
                    break;
                }
                auto snapshot = accounts;
                auto logs_snapshot = c.logs;
                auto refund_snapshot = c.refund;
                auto warm_a = c.warm_accounts;
                auto warm_s = c.warm_slots;
                auto d_list = c.destructs;
                auto d_set = c.destruct_set;
                auto d_chain = c.destruct_chain;
                if (op == OP_CALL && val != 0) {
                    accounts[contract].balance -= val;
                    accounts[to].balance += val;
                }
                Address run_as = (op == OP_CALL || op == OP_STATICCALL) ? to : contract;
                Address run_caller = op == OP_DELEGATECALL ? caller : contract;
                Word256 run_value = op == OP_DELEGATECALL ? value : val;
                Bytes callee_code = accounts.count(to) ? accounts[to].code : Bytes{};
                CallOut r = run_frame(c, run_as, run_caller, run_value, mslice(in, insz),
                                      callee_code, op == OP_STATICCALL ? false : writable,
                                      depth + 1, fwd + (val != 0 ? g_.call_stipend : 0), false);
                if (r.status != 1) {
                    accounts = snapshot;
                    c.logs = logs_snapshot;
                    c.refund = refund_snapshot;
                    c.warm_accounts = warm_a;
                    c.warm_slots = warm_s;
                    c.destructs = d_list;
                    c.destruct_set = d_set;
                    c.destruct_chain = d_chain;
                }
                gas += r.status == -1 ? 0 : r.gas_left;
                retdata = r.status == -1 ? Bytes{} : r.ret;
                if (r.status != -1) {
                    uint64_t n = std::min<uint64_t>(outsz, r.ret.size());
                    for (uint64_t i = 0; i < n; ++i) mem[outo + i] = r.ret[i];
                }
                st.push_back(r.status == 1 ? 1 : 0);
                break;
            }
            default:
                if (op == OP_PUSH0) { st.push_back(0); break; }
                if (is_push(op)) {
                    unsigned n = op - OP_PUSH1 + 1;
                    Bytes imm(n, 0);
                    for (unsigned i = 0; i < n; ++i)
                        if (pc + 1 + i < code.size()) imm[i] = code[pc + 1 + i];
                    st.push_back(w256_from_bytes(imm));
                    pc += 1 + n;
                    continue;
                }
                if (is_dup(op)) { st.push_back(peek(op - OP_DUP1)); break; }
                if (is_swap(op)) {
                    unsigned n = op - OP_SWAP1 + 1;
                    std::swap(st[st.size() - 1], st[st.size() - 1 - n]);
                    break;
                }
                if (is_log(op)) {
                    unsigned topics = op - OP_LOG0;
                    uint64_t off = u64(pop()), n = u64(pop());
                    LogEntry e;
                    e.address = contract;
                    for (unsigned i = 0; i < topics; ++i) e.topics.push_back(w256_to_hash(pop()));
                    e.data = mslice(off, n);
                    c.logs.append(e.rlp());
                    break;
                }
                return exceptional();
        }
        ++pc;
    }
}

}  // namespace fpvm::test

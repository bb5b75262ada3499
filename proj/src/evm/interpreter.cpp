// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#include "fpvm/evm/interpreter.hpp"

#include "fpvm/commit/memory_tree.hpp"

namespace fpvm::evm {

namespace {

// Accrued transaction substate: self-destructs, logs, refund and the access
// sets, with the access list mirrored into its committed trie form.
struct Substate {
    std::vector<Address> self_destructs;
    std::set<Address> self_destruct_set;
    HashChain self_destruct_chain;
    HashChain log_chain;
    int64_t refund = 0;
    Mpt access_trie;
    std::map<Address, std::set<Word256>> access;
    std::set<Address> touched;

    bool account_warm(const Address& a) const { return access.contains(a); }
    bool slot_warm(const Address& a, const Word256& slot) const {
        auto it = access.find(a);
        return it != access.end() && it->second.contains(slot);
    }

    void write_access_entry(const Address& a) {
        access_trie = access_trie.update(BytesView(a.bytes), BytesView(access_entry_rlp(access[a])));
    }

    void warm_account(const Address& a) {
        if (access.emplace(a, std::set<Word256>{}).second) write_access_entry(a);
    }

    void warm_slot(const Address& a, const Word256& slot) {
        bool changed = access.emplace(a, std::set<Word256>{}).second;
        changed |= access[a].insert(slot).second;
        if (changed) write_access_entry(a);
    }

    void mark_self_destruct(const Address& a) {
        if (self_destruct_set.insert(a).second) {
            self_destructs.push_back(a);
            self_destruct_chain.append(BytesView(a.bytes));
        }
    }
};

struct Frame {
    Address contract;
    Address caller;
    Word256 value = 0;
    std::shared_ptr<const Bytes> input;
    std::shared_ptr<const Bytes> code;
    Hash32 code_hash;
    uint8_t call_flag = 0;
    bool writable = true;
    uint64_t depth = 1;
    uint64_t gas = 0;
    uint64_t pc = 0;
    Bytes memory;
    std::vector<Word256> stack;
    Bytes return_data;
    uint64_t out_offset = 0;
    uint64_t out_size = 0;
    bool is_create = false;

    WorldState world_checkpoint;
    Substate substate_checkpoint;

    Hash32 last_depth_hash;
    std::shared_ptr<const oss::IntraState> caller_view;
    std::shared_ptr<const Bytes> caller_memory;

    std::shared_ptr<std::vector<bool>> jumpdests;

    uint8_t fetch() const { return pc < code->size() ? (*code)[pc] : uint8_t{OP_STOP}; }

    const Word256& peek(size_t i) const { return stack[stack.size() - 1 - i]; }
    Word256 pop() {
        Word256 v = stack.back();
        stack.pop_back();
        return v;
    }
    void push(const Word256& v) { stack.push_back(v); }

    uint64_t memory_words() const { return memory.size() / 32; }
    void expand_memory(uint64_t words) {
        if (words * 32 > memory.size()) memory.resize(words * 32, 0);
    }
    Bytes read_memory(uint64_t off, uint64_t len) const {
        Bytes out(len, 0);
        for (uint64_t i = 0; i < len && off + i < memory.size(); ++i) out[i] = memory[off + i];
        return out;
    }
    bool valid_jumpdest(uint64_t target) {
        if (target >= code->size() || (*code)[target] != OP_JUMPDEST) return false;
        if (!jumpdests) {
            jumpdests = std::make_shared<std::vector<bool>>(code->size(), false);
            for (size_t i = 0; i < code->size(); ++i) {
                uint8_t op = (*code)[i];
                if (op == OP_JUMPDEST) (*jumpdests)[i] = true;
                if (is_push(op)) i += op - OP_PUSH1 + 1;
            }
        }
        return (*jumpdests)[target];
    }
};

enum class ExitKind { Success, Revert, Halt };

struct FrameExit {
    ExitKind kind;
    Bytes ret;
};

struct TxOutcome {
    ExitKind kind;
    uint64_t gas_left = 0;
    Bytes ret;
};

// One transaction's execution over a mutable world.
struct Execution {
    WorldState& world;
    const GasSchedule& g;
    const BlockContext& ctx;
    const Transaction& tx;
    const BlockHashTree& tree;
    uint64_t tx_index;
    StepListener* listener;
    std::shared_ptr<const TxContext> tx_ctx;
    Hash32 committed_world_root;

    Substate sub;
    std::vector<Frame> frames;

    // ---- capture ----

    oss::IntraState build_view(const Frame& f) const {
        oss::IntraState s;
        s.block_number = ctx.number;
        s.tx_index = tx_index;
        s.depth = f.depth;
        s.gas = f.gas;
        s.refund = static_cast<uint64_t>(std::max<int64_t>(sub.refund, 0));
        s.last_depth_hash = f.last_depth_hash;
        s.contract = f.contract;
        s.caller = f.caller;
        s.value = f.value;
        s.call_flag = f.call_flag;
        s.writable = f.writable;
        s.out_offset = f.out_offset;
        s.out_size = f.out_size;
        s.code_hash = f.code_hash;
        s.pc = f.pc;
        s.opcode = f.fetch();
        s.stack = {stack_hash(f.stack), f.stack.size()};
        s.memory_size = f.memory.size();
        s.memory_root = memory_root(f.memory);
        s.input_size = f.input->size();
        s.input_root = memory_root(*f.input);
        s.return_size = f.return_data.size();
        s.return_root = memory_root(f.return_data);
        s.world_root = world.root();
        s.committed_world_root = committed_world_root;
        s.self_destruct_head = sub.self_destruct_chain.head;
        s.access_list_root = sub.access_trie.root();
        s.log_head = sub.log_chain.head;
        s.block_hash_tree_root = tree.root();
        return oss::make_intra(std::move(s));
    }

    void emit_boundary(const Frame& f) {
        oss::IntraState view = build_view(f);
        StepRecord record;
        record.hash = oss::oss_hash(view);
        record.state = std::move(view);
        auto deep = std::make_shared<StepDeep>();
        deep->tx_ctx = tx_ctx;
        deep->stack = f.stack;
        deep->memory = f.memory;
        deep->input = f.input;
        deep->return_data = f.return_data;
        deep->code = f.code;
        deep->world_store = world.store();
        deep->codes = world.codes();
        deep->access_trie = sub.access_trie;
        deep->block_tree = tree;
        deep->caller_view = f.caller_view;
        deep->caller_memory = f.caller_memory;
        deep->self_destructs = sub.self_destructs;
        deep->block_ctx = ctx;
        deep->tx_trie = tx_ctx ? tx_ctx->tx_trie : Mpt();
        deep->receipt_trie = tx_ctx ? tx_ctx->receipt_trie : Mpt();
        record.deep = std::move(deep);
        listener->on_state(std::move(record));
    }

    // Caller view frozen at the call transition: arguments popped, all call
    // charges applied, memory expanded, callee warmed, forwarded gas moved
    // out, world still pre-transfer.
    void freeze_caller(Frame& parent, Frame& child) {
        if (!listener) return;
        auto view = std::make_shared<oss::IntraState>(build_view(parent));
        child.last_depth_hash = oss::oss_hash(*view);
        child.caller_view = std::move(view);
        child.caller_memory = std::make_shared<const Bytes>(parent.memory);
    }

    // ---- stepping ----

    struct StepOut {
        bool frame_done = false;
        FrameExit exit;
    };

    StepOut halt_frame(Frame& f) {
        f.gas = 0;
        return {true, {ExitKind::Halt, {}}};
    }

    uint64_t expansion_words(const Frame& f, uint64_t off, uint64_t size) const {
        return std::max(f.memory_words(), words_to_cover(off, size));
    }

    uint64_t call_expansion(const Frame& f, size_t first_mem_arg) const {
        uint64_t in = w256_to_u64_saturated(f.peek(first_mem_arg));
        uint64_t insize = w256_to_u64_saturated(f.peek(first_mem_arg + 1));
        uint64_t out = w256_to_u64_saturated(f.peek(first_mem_arg + 2));
        uint64_t outsize = w256_to_u64_saturated(f.peek(first_mem_arg + 3));
        return std::max(expansion_words(f, in, insize), expansion_words(f, out, outsize));
    }

    uint64_t sstore_cost(const Frame& f, const Word256& slot, const Word256& next,
                         const Word256& current, const Word256& original) const {
        uint64_t cost = sub.slot_warm(f.contract, slot) ? 0 : g.cold_sload_cost;
        if (current == next) return cost + g.warm_access_cost;
        if (original == current)
            return cost + (original == 0 ? g.sstore_set_cost : g.sstore_reset_cost);
        return cost + g.warm_access_cost;
    }

    void sstore_refund(const Word256& next, const Word256& current, const Word256& original) {
        if (current == next) return;
        int64_t clear = static_cast<int64_t>(g.sstore_clear_refund);
        if (original == current) {
            if (original != 0 && next == 0) sub.refund += clear;
            return;
        }
        if (original != 0) {
            if (current == 0) sub.refund -= clear;
            else if (next == 0) sub.refund += clear;
        }
        if (next == original) {
            if (original == 0)
                sub.refund += static_cast<int64_t>(g.sstore_set_cost - g.warm_access_cost);
            else
                sub.refund += static_cast<int64_t>(g.sstore_reset_cost - g.warm_access_cost);
        }
    }

    // Check order shared with the one-step verifier: opcode validity, stack
    // underflow, overflow, static violation, gas, opcode-specific faults.
    StepOut step(Frame& f) {
        uint8_t op = f.fetch();
        const OpcodeInfo& info = opcode_info(op);

        if (!info.supported || op == OP_INVALID) return halt_frame(f);
        if (f.stack.size() < info.delta) return halt_frame(f);
        if (f.stack.size() - info.delta + info.alpha > g.stack_limit) return halt_frame(f);
        if (!f.writable && (is_write_op(op) || (op == OP_CALL && f.peek(2) != 0)))
            return halt_frame(f);

        // Cost, computed from peeked operands with no state mutation.
        uint64_t cost = g.base_cost[op];
        uint64_t new_words = f.memory_words();
        switch (op) {
            case OP_EXP:
                cost = saturating_add(
                    cost, saturating_mul(g.exp_byte_cost, w256_byte_length(f.peek(1))));
                break;
            case OP_KECCAK256: {
                uint64_t size = w256_to_u64_saturated(f.peek(1));
                cost = saturating_add(cost, saturating_mul(g.keccak_word_cost, (size + 31) / 32));
                new_words = expansion_words(f, w256_to_u64_saturated(f.peek(0)), size);
                break;
            }
            case OP_CALLDATACOPY:
            case OP_CODECOPY:
            case OP_RETURNDATACOPY: {
                uint64_t size = w256_to_u64_saturated(f.peek(2));
                cost = saturating_add(cost, g.copy_cost(size));
                new_words = expansion_words(f, w256_to_u64_saturated(f.peek(0)), size);
                break;
            }
            case OP_EXTCODECOPY: {
                uint64_t size = w256_to_u64_saturated(f.peek(3));
                cost = saturating_add(cost, g.copy_cost(size));
                new_words = expansion_words(f, w256_to_u64_saturated(f.peek(1)), size);
                cost = saturating_add(cost, sub.account_warm(w256_to_address(f.peek(0)))
                                                ? g.warm_access_cost
                                                : g.cold_account_cost);
                break;
            }
            case OP_BALANCE:
            case OP_EXTCODESIZE:
            case OP_EXTCODEHASH:
                cost = saturating_add(cost, sub.account_warm(w256_to_address(f.peek(0)))
                                                ? g.warm_access_cost
                                                : g.cold_account_cost);
                break;
            case OP_MLOAD:
            case OP_MSTORE:
                new_words = expansion_words(f, w256_to_u64_saturated(f.peek(0)), 32);
                break;
            case OP_MSTORE8:
                new_words = expansion_words(f, w256_to_u64_saturated(f.peek(0)), 1);
                break;
            case OP_SLOAD:
                cost = saturating_add(cost, sub.slot_warm(f.contract, f.peek(0))
                                                ? g.warm_access_cost
                                                : g.cold_sload_cost);
                break;
            case OP_SSTORE: {
                const Word256& slot = f.peek(0);
                Word256 current = world.storage(f.contract, slot);
                Word256 original = world.storage_at_root(committed_world_root, f.contract, slot);
                cost = saturating_add(cost, sstore_cost(f, slot, f.peek(1), current, original));
                break;
            }
            case OP_RETURN:
            case OP_REVERT:
                new_words = expansion_words(f, w256_to_u64_saturated(f.peek(0)),
                                            w256_to_u64_saturated(f.peek(1)));
                break;
            case OP_CALL:
            case OP_CALLCODE: {
                new_words = call_expansion(f, 3);
                cost = saturating_add(cost, sub.account_warm(w256_to_address(f.peek(1)))
                                                ? g.warm_access_cost
                                                : g.cold_account_cost);
                if (f.peek(2) != 0) {
                    cost = saturating_add(cost, g.call_value_cost);
                    if (op == OP_CALL && !world.account(w256_to_address(f.peek(1))))
                        cost = saturating_add(cost, g.new_account_cost);
                }
                break;
            }
            case OP_DELEGATECALL:
            case OP_STATICCALL:
                new_words = call_expansion(f, 2);
                cost = saturating_add(cost, sub.account_warm(w256_to_address(f.peek(1)))
                                                ? g.warm_access_cost
                                                : g.cold_account_cost);
                break;
            case OP_CREATE:
                new_words = expansion_words(f, w256_to_u64_saturated(f.peek(1)),
                                            w256_to_u64_saturated(f.peek(2)));
                break;
            case OP_CREATE2: {
                uint64_t size = w256_to_u64_saturated(f.peek(2));
                cost = saturating_add(cost, saturating_mul(g.keccak_word_cost, (size + 31) / 32));
                new_words = expansion_words(f, w256_to_u64_saturated(f.peek(1)), size);
                break;
            }
            case OP_SELFDESTRUCT: {
                Address beneficiary = w256_to_address(f.peek(0));
                if (!sub.account_warm(beneficiary))
                    cost = saturating_add(cost, g.cold_account_cost);
                auto self = world.account(f.contract);
                if (!world.account(beneficiary) && self && self->balance > 0)
                    cost = saturating_add(cost, g.new_account_cost);
                break;
            }
            default:
                if (is_log(op)) {
                    unsigned topics = op - OP_LOG0;
                    uint64_t size = w256_to_u64_saturated(f.peek(1));
                    cost = saturating_add(cost, g.log_topic_cost * topics);
                    cost = saturating_add(cost, saturating_mul(g.log_data_byte_cost, size));
                    new_words = expansion_words(f, w256_to_u64_saturated(f.peek(0)), size);
                }
                break;
        }
        cost = saturating_add(cost, g.memory_expansion_cost(f.memory_words(), new_words));

        if (cost > f.gas) return halt_frame(f);
        f.gas -= cost;
        f.expand_memory(new_words);

        return execute(f, op);
    }

    StepOut execute(Frame& f, uint8_t op) {
        switch (op) {
            case OP_STOP:
                return {true, {ExitKind::Success, {}}};
            case OP_ADD: { Word256 a = f.pop(), b = f.pop(); f.push(a + b); break; }
            case OP_MUL: { Word256 a = f.pop(), b = f.pop(); f.push(a * b); break; }
            case OP_SUB: { Word256 a = f.pop(), b = f.pop(); f.push(a - b); break; }
            case OP_DIV: { Word256 a = f.pop(), b = f.pop(); f.push(w256_div(a, b)); break; }
            case OP_SDIV: { Word256 a = f.pop(), b = f.pop(); f.push(w256_sdiv(a, b)); break; }
            case OP_MOD: { Word256 a = f.pop(), b = f.pop(); f.push(w256_mod(a, b)); break; }
            case OP_SMOD: { Word256 a = f.pop(), b = f.pop(); f.push(w256_smod(a, b)); break; }
            case OP_ADDMOD: {
                Word256 a = f.pop(), b = f.pop(), n = f.pop();
                f.push(w256_addmod(a, b, n));
                break;
            }
            case OP_MULMOD: {
                Word256 a = f.pop(), b = f.pop(), n = f.pop();
                f.push(w256_mulmod(a, b, n));
                break;
            }
            case OP_EXP: { Word256 b = f.pop(), e = f.pop(); f.push(w256_exp(b, e)); break; }
            case OP_SIGNEXTEND: {
                Word256 i = f.pop(), v = f.pop();
                f.push(w256_signextend(i, v));
                break;
            }
            case OP_LT: { Word256 a = f.pop(), b = f.pop(); f.push(a < b ? 1 : 0); break; }
            case OP_GT: { Word256 a = f.pop(), b = f.pop(); f.push(a > b ? 1 : 0); break; }
            case OP_SLT: { Word256 a = f.pop(), b = f.pop(); f.push(w256_slt(a, b) ? 1 : 0); break; }
            case OP_SGT: { Word256 a = f.pop(), b = f.pop(); f.push(w256_slt(b, a) ? 1 : 0); break; }
            case OP_EQ: { Word256 a = f.pop(), b = f.pop(); f.push(a == b ? 1 : 0); break; }
            case OP_ISZERO: { Word256 a = f.pop(); f.push(a == 0 ? 1 : 0); break; }
            case OP_AND: { Word256 a = f.pop(), b = f.pop(); f.push(a & b); break; }
            case OP_OR: { Word256 a = f.pop(), b = f.pop(); f.push(a | b); break; }
            case OP_XOR: { Word256 a = f.pop(), b = f.pop(); f.push(a ^ b); break; }
            case OP_NOT: { Word256 a = f.pop(); f.push(~a); break; }
            case OP_BYTE: { Word256 i = f.pop(), v = f.pop(); f.push(w256_byte(i, v)); break; }
            case OP_SHL: { Word256 s = f.pop(), v = f.pop(); f.push(w256_shl(s, v)); break; }
            case OP_SHR: { Word256 s = f.pop(), v = f.pop(); f.push(w256_shr(s, v)); break; }
            case OP_SAR: { Word256 s = f.pop(), v = f.pop(); f.push(w256_sar(s, v)); break; }
            case OP_KECCAK256: {
                uint64_t off = w256_to_u64_saturated(f.pop());
                uint64_t size = w256_to_u64_saturated(f.pop());
                f.push(w256_from_hash(keccak256(f.read_memory(off, size))));
                break;
            }
            case OP_ADDRESS: f.push(w256_from_address(f.contract)); break;
            case OP_BALANCE: {
                Address a = w256_to_address(f.pop());
                sub.warm_account(a);
                auto acct = world.account(a);
                f.push(acct ? acct->balance : 0);
                break;
            }
            case OP_ORIGIN: f.push(w256_from_address(tx.sender)); break;
            case OP_CALLER: f.push(w256_from_address(f.caller)); break;
            case OP_CALLVALUE: f.push(f.value); break;
            case OP_CALLDATALOAD: {
                uint64_t off = w256_to_u64_saturated(f.pop());
                Bytes word(32, 0);
                for (int i = 0; i < 32; ++i)
                    if (off + i < f.input->size()) word[i] = (*f.input)[off + i];
                f.push(w256_from_bytes(word));
                break;
            }
            case OP_CALLDATASIZE: f.push(f.input->size()); break;
            case OP_CALLDATACOPY: {
                uint64_t dst = w256_to_u64_saturated(f.pop());
                uint64_t src = w256_to_u64_saturated(f.pop());
                uint64_t size = w256_to_u64_saturated(f.pop());
                for (uint64_t i = 0; i < size; ++i)
                    f.memory[dst + i] = src + i < f.input->size() ? (*f.input)[src + i] : 0;
                break;
            }
            case OP_CODESIZE: f.push(f.code->size()); break;
            case OP_CODECOPY: {
                uint64_t dst = w256_to_u64_saturated(f.pop());
                uint64_t src = w256_to_u64_saturated(f.pop());
                uint64_t size = w256_to_u64_saturated(f.pop());
                for (uint64_t i = 0; i < size; ++i)
                    f.memory[dst + i] = src + i < f.code->size() ? (*f.code)[src + i] : 0;
                break;
            }
            case OP_GASPRICE: f.push(tx.gas_price); break;
            case OP_EXTCODESIZE: {
                Address a = w256_to_address(f.pop());
                sub.warm_account(a);
                auto acct = world.account(a);
                f.push(acct ? world.code(acct->code_hash).size() : 0);
                break;
            }
            case OP_EXTCODECOPY: {
                Address a = w256_to_address(f.pop());
                uint64_t dst = w256_to_u64_saturated(f.pop());
                uint64_t src = w256_to_u64_saturated(f.pop());
                uint64_t size = w256_to_u64_saturated(f.pop());
                sub.warm_account(a);
                auto acct = world.account(a);
                Bytes code = acct ? world.code(acct->code_hash) : Bytes{};
                for (uint64_t i = 0; i < size; ++i)
                    f.memory[dst + i] = src + i < code.size() ? code[src + i] : 0;
                break;
            }
            case OP_RETURNDATASIZE: f.push(f.return_data.size()); break;
            case OP_RETURNDATACOPY: {
                uint64_t dst = w256_to_u64_saturated(f.pop());
                Word256 src_w = f.pop();
                Word256 size_w = f.pop();
                if (Word512(src_w) + Word512(size_w) > f.return_data.size())
                    return halt_frame(f);
                uint64_t src = w256_to_u64_saturated(src_w);
                uint64_t size = w256_to_u64_saturated(size_w);
                for (uint64_t i = 0; i < size; ++i) f.memory[dst + i] = f.return_data[src + i];
                break;
            }
            case OP_EXTCODEHASH: {
                Address a = w256_to_address(f.pop());
                sub.warm_account(a);
                auto acct = world.account(a);
                f.push(acct ? w256_from_hash(acct->code_hash) : 0);
                break;
            }
            case OP_BLOCKHASH: {
                Word256 n = f.pop();
                // The tree holds the up-to-256 ancestors of the current block.
                if (n < ctx.number && Word256(ctx.number) - n <= 256) {
                    uint64_t num = static_cast<uint64_t>(n);
                    f.push(w256_from_hash(tree.leaf(num % 256)));
                } else {
                    f.push(0);
                }
                break;
            }
            case OP_COINBASE: f.push(w256_from_address(ctx.coinbase)); break;
            case OP_TIMESTAMP: f.push(ctx.timestamp); break;
            case OP_NUMBER: f.push(ctx.number); break;
            case OP_GASLIMIT: f.push(ctx.gas_limit); break;
            case OP_SELFBALANCE: {
                auto acct = world.account(f.contract);
                f.push(acct ? acct->balance : 0);
                break;
            }
            case OP_BASEFEE: f.push(ctx.base_fee); break;
            case OP_POP: f.pop(); break;
            case OP_MLOAD: {
                uint64_t off = w256_to_u64_saturated(f.pop());
                f.push(w256_from_bytes(f.read_memory(off, 32)));
                break;
            }
            case OP_MSTORE: {
                uint64_t off = w256_to_u64_saturated(f.pop());
                auto word = w256_bytes(f.pop());
                std::copy(word.begin(), word.end(), f.memory.begin() + off);
                break;
            }
            case OP_MSTORE8: {
                uint64_t off = w256_to_u64_saturated(f.pop());
                Word256 v = f.pop();
                f.memory[off] = static_cast<uint8_t>(v & 0xff);
                break;
            }
            case OP_SLOAD: {
                Word256 slot = f.pop();
                sub.warm_slot(f.contract, slot);
                f.push(world.storage(f.contract, slot));
                break;
            }
            case OP_SSTORE: {
                Word256 slot = f.pop();
                Word256 next = f.pop();
                Word256 current = world.storage(f.contract, slot);
                Word256 original = world.storage_at_root(committed_world_root, f.contract, slot);
                sub.warm_slot(f.contract, slot);
                sstore_refund(next, current, original);
                if (current != next) world.set_storage(f.contract, slot, next);
                break;
            }
            case OP_JUMP: {
                uint64_t target = w256_to_u64_saturated(f.pop());
                if (!f.valid_jumpdest(target)) return halt_frame(f);
                f.pc = target;
                return {};
            }
            case OP_JUMPI: {
                uint64_t target = w256_to_u64_saturated(f.pop());
                Word256 cond = f.pop();
                if (cond != 0) {
                    if (!f.valid_jumpdest(target)) return halt_frame(f);
                    f.pc = target;
                    return {};
                }
                break;
            }
            case OP_PC: f.push(f.pc); break;
            case OP_MSIZE: f.push(f.memory.size()); break;
            case OP_GAS: f.push(f.gas); break;
            case OP_JUMPDEST: break;
            case OP_RETURN: {
                uint64_t off = w256_to_u64_saturated(f.pop());
                uint64_t size = w256_to_u64_saturated(f.pop());
                return {true, {ExitKind::Success, f.read_memory(off, size)}};
            }
            case OP_REVERT: {
                uint64_t off = w256_to_u64_saturated(f.pop());
                uint64_t size = w256_to_u64_saturated(f.pop());
                return {true, {ExitKind::Revert, f.read_memory(off, size)}};
            }
            case OP_SELFDESTRUCT: {
                Address beneficiary = w256_to_address(f.pop());
                sub.warm_account(beneficiary);
                auto self = world.account(f.contract);
                Word256 balance = self ? self->balance : 0;
                world.credit(beneficiary, balance);
                if (auto after = world.account(f.contract)) {
                    after->balance = 0;  // burned when beneficiary == self
                    world.put_account(f.contract, *after);
                }
                sub.mark_self_destruct(f.contract);
                sub.touched.insert(beneficiary);
                return {true, {ExitKind::Success, {}}};
            }
            case OP_CREATE:
            case OP_CREATE2:
                return do_create(f, op);
            case OP_CALL:
            case OP_CALLCODE:
            case OP_DELEGATECALL:
            case OP_STATICCALL:
                return do_call(f, op);
            default:
                if (op == OP_PUSH0) {
                    f.push(0);
                    break;
                }
                if (is_push(op)) {
                    unsigned n = op - OP_PUSH1 + 1;
                    Bytes imm(n, 0);
                    for (unsigned i = 0; i < n; ++i)
                        if (f.pc + 1 + i < f.code->size()) imm[i] = (*f.code)[f.pc + 1 + i];
                    f.push(w256_from_bytes(imm));
                    f.pc += 1 + n;
                    return {};
                }
                if (is_dup(op)) {
                    unsigned n = op - OP_DUP1 + 1;
                    f.push(f.peek(n - 1));
                    break;
                }
                if (is_swap(op)) {
                    unsigned n = op - OP_SWAP1 + 1;
                    std::swap(f.stack[f.stack.size() - 1], f.stack[f.stack.size() - 1 - n]);
                    break;
                }
                if (is_log(op)) {
                    unsigned topics = op - OP_LOG0;
                    uint64_t off = w256_to_u64_saturated(f.pop());
                    uint64_t size = w256_to_u64_saturated(f.pop());
                    LogEntry entry;
                    entry.address = f.contract;
                    for (unsigned i = 0; i < topics; ++i)
                        entry.topics.push_back(w256_to_hash(f.pop()));
                    entry.data = f.read_memory(off, size);
                    sub.log_chain.append(entry.rlp());
                    break;
                }
                return halt_frame(f);  // unreachable for supported opcodes
        }
        f.pc += 1;
        return {};
    }

    StepOut do_call(Frame& f, uint8_t op) {
        uint64_t requested = w256_to_u64_saturated(f.pop());
        Address target = w256_to_address(f.pop());
        Word256 value = (op == OP_CALL || op == OP_CALLCODE) ? f.pop() : Word256(0);
        uint64_t in = w256_to_u64_saturated(f.pop());
        uint64_t insize = w256_to_u64_saturated(f.pop());
        uint64_t out = w256_to_u64_saturated(f.pop());
        uint64_t outsize = w256_to_u64_saturated(f.pop());

        sub.warm_account(target);
        sub.touched.insert(target);

        uint64_t forwarded = g.forwarded_gas(requested, f.gas);
        f.gas -= forwarded;

        bool needs_balance = (op == OP_CALL || op == OP_CALLCODE) && value != 0;
        auto self = world.account(f.contract);
        bool value_ok = !needs_balance || (self && self->balance >= value);

        if (f.depth >= g.call_depth_limit || !value_ok) {
            f.gas += forwarded;  // nothing ran
            f.return_data.clear();
            f.push(0);
            f.pc += 1;
            return {};
        }

        Frame child;
        child.caller = op == OP_DELEGATECALL ? f.caller : f.contract;
        child.contract = (op == OP_CALL || op == OP_STATICCALL) ? target : f.contract;
        child.value = op == OP_DELEGATECALL ? f.value : value;
        child.call_flag = op == OP_CALL       ? 0
                          : op == OP_CALLCODE ? 1
                          : op == OP_DELEGATECALL ? 2
                                                  : 3;
        child.writable = op == OP_STATICCALL ? false : f.writable;
        child.depth = f.depth + 1;
        child.gas = forwarded + (value != 0 ? g.call_stipend : 0);
        child.input = std::make_shared<const Bytes>(f.read_memory(in, insize));
        auto target_acct = world.account(target);
        child.code_hash = target_acct ? target_acct->code_hash : EMPTY_KECCAK;
        child.code = std::make_shared<const Bytes>(world.code(child.code_hash));
        child.out_offset = out;
        child.out_size = outsize;

        freeze_caller(f, child);

        child.world_checkpoint = world;
        child.substate_checkpoint = sub;
        if (op == OP_CALL && value != 0) world.transfer(f.contract, target, value);

        frames.push_back(std::move(child));
        return {};
    }

    StepOut do_create(Frame& f, uint8_t op) {
        Word256 value = f.pop();
        uint64_t off = w256_to_u64_saturated(f.pop());
        uint64_t size = w256_to_u64_saturated(f.pop());
        Word256 salt = op == OP_CREATE2 ? f.pop() : Word256(0);
        Bytes initcode = f.read_memory(off, size);

        uint64_t forwarded = g.forwarded_gas(f.gas, f.gas);
        f.gas -= forwarded;

        auto self = world.account(f.contract);
        Word256 self_balance = self ? self->balance : 0;
        if (f.depth >= g.call_depth_limit || self_balance < value) {
            f.gas += forwarded;
            f.return_data.clear();
            f.push(0);
            f.pc += 1;
            return {};
        }

        // The creator's nonce bumps before the collision check and stays
        // bumped even when the creation fails.
        Account creator = *self;
        uint64_t creation_nonce = creator.nonce;
        creator.nonce += 1;
        world.put_account(f.contract, creator);

        Address new_addr = op == OP_CREATE
                               ? create_address(f.contract, creation_nonce)
                               : create2_address(f.contract, salt, keccak256(initcode));
        sub.warm_account(new_addr);

        auto existing = world.account(new_addr);
        if (existing && (existing->nonce != 0 || existing->code_hash != EMPTY_KECCAK)) {
            // Collision burns the forwarded gas.
            f.return_data.clear();
            f.push(0);
            f.pc += 1;
            return {};
        }

        Frame child;
        child.caller = f.contract;
        child.contract = new_addr;
        child.value = value;
        child.call_flag = op == OP_CREATE ? 4 : 5;
        child.writable = f.writable;
        child.depth = f.depth + 1;
        child.gas = forwarded;
        child.input = std::make_shared<const Bytes>();
        child.code = std::make_shared<const Bytes>(std::move(initcode));
        child.code_hash = keccak256(*child.code);
        child.is_create = true;

        freeze_caller(f, child);

        child.world_checkpoint = world;
        child.substate_checkpoint = sub;

        Account fresh = existing.value_or(Account{});
        fresh.nonce = 1;
        fresh.code_hash = EMPTY_KECCAK;
        fresh.storage_root = EMPTY_TRIE_ROOT;
        world.put_account(new_addr, fresh);
        if (value != 0) world.transfer(f.contract, new_addr, value);

        frames.push_back(std::move(child));
        return {};
    }

    // Applies a finished frame to its parent; returns the tx outcome when
    // the bottom frame finishes.
    std::optional<TxOutcome> finish_frame(FrameExit exit) {
        Frame done = std::move(frames.back());
        frames.pop_back();

        if (exit.kind == ExitKind::Success && done.is_create) {
            uint64_t deposit = saturating_mul(g.code_deposit_byte_cost, exit.ret.size());
            if (exit.ret.size() > g.max_code_size || deposit > done.gas) {
                exit = {ExitKind::Halt, {}};
                done.gas = 0;
            } else {
                done.gas -= deposit;
                Hash32 code_hash = world.put_code(exit.ret);
                auto acct = world.account(done.contract);
                acct->code_hash = code_hash;
                world.put_account(done.contract, *acct);
            }
        }
        if (exit.kind != ExitKind::Success) {
            world = done.world_checkpoint;
            sub = done.substate_checkpoint;
        }

        if (frames.empty())
            return TxOutcome{exit.kind, exit.kind == ExitKind::Halt ? 0 : done.gas,
                             done.is_create ? Bytes{} : std::move(exit.ret)};

        Frame& parent = frames.back();
        parent.gas += exit.kind == ExitKind::Halt ? 0 : done.gas;
        if (done.is_create) {
            parent.return_data = exit.kind == ExitKind::Revert ? exit.ret : Bytes{};
            parent.push(exit.kind == ExitKind::Success ? w256_from_address(done.contract)
                                                       : Word256(0));
        } else {
            parent.return_data = exit.kind == ExitKind::Halt ? Bytes{} : exit.ret;
            if (exit.kind != ExitKind::Halt) {
                uint64_t n = std::min<uint64_t>(done.out_size, exit.ret.size());
                for (uint64_t i = 0; i < n; ++i) parent.memory[done.out_offset + i] = exit.ret[i];
            }
            parent.push(exit.kind == ExitKind::Success ? 1 : 0);
        }
        parent.pc += 1;
        return std::nullopt;
    }

    TxOutcome run() {
        while (true) {
            if (listener) emit_boundary(frames.back());
            StepOut out = step(frames.back());
            if (out.frame_done) {
                auto outcome = finish_frame(std::move(out.exit));
                if (outcome) return *outcome;
            }
        }
    }
};

}  // namespace

Bytes encode_block_header(const BlockContext& ctx, uint64_t gas_used, const Hash32& world_root,
                          const Hash32& tx_root, const Hash32& receipt_root) {
    return rlp::encode(rlp::Item::of({
        rlp::Item::uint(ctx.number),
        rlp::Item::uint(ctx.timestamp),
        rlp::Item::string(BytesView(ctx.coinbase.bytes)),
        rlp::Item::uint(ctx.gas_limit),
        rlp::Item::uint(ctx.base_fee),
        rlp::Item::uint(gas_used),
        rlp::Item::string(BytesView(world_root.bytes)),
        rlp::Item::string(BytesView(tx_root.bytes)),
        rlp::Item::string(BytesView(receipt_root.bytes)),
    }));
}

Chain::Chain(WorldState genesis, GasSchedule schedule)
    : world_(std::move(genesis)), schedule_(std::move(schedule)) {
    tip_ = oss::BlockState{0, world_.root(), 0, tree_.root()};
}

bool Chain::transaction_valid(const Transaction& tx) const {
    auto sender = world_.account(tx.sender);
    uint64_t nonce = sender ? sender->nonce : 0;
    Word256 balance = sender ? sender->balance : 0;
    if (tx.nonce != nonce) return false;
    if (Word512(tx.gas_price) * tx.gas_limit + Word512(tx.value) > Word512(balance)) return false;
    if (tx.gas_limit < schedule_.intrinsic_cost(tx.data, tx.is_create())) return false;
    if (tx.is_create()) {
        auto existing = world_.account(create_address(tx.sender, tx.nonce));
        if (existing && (existing->nonce != 0 || existing->code_hash != EMPTY_KECCAK))
            return false;  // address collision
    }
    return true;
}

BlockResult Chain::execute_block(const BlockContext& ctx, const std::vector<Transaction>& txs,
                                 StepListener* listener) {
    if (ctx.number != tip_.block_number + 1)
        throw std::invalid_argument("block number must extend the tip");
    uint64_t total_limit = 0;
    for (const auto& tx : txs) total_limit = saturating_add(total_limit, tx.gas_limit);
    if (total_limit > ctx.gas_limit) throw std::invalid_argument("block over gas limit");

    auto emit_state = [&](oss::OneStepState state, std::shared_ptr<StepDeep> deep) {
        if (!listener) return;
        StepRecord record;
        record.hash = oss::oss_hash(state);
        record.state = std::move(state);
        record.deep = std::move(deep);
        listener->on_state(std::move(record));
    };

    Mpt tx_trie;
    Mpt receipt_trie;
    uint64_t cumulative_gas = 0;
    uint64_t executed = 0;

    // Inter states exist only while someone is watching; normal execution
    // commits block states alone.
    oss::InterState inter;
    Hash32 inter_hash;
    auto refresh_inter = [&] {
        if (!listener) return;
        oss::InterState s;
        s.block_number = ctx.number;
        s.tx_index = executed;
        s.world_root = world_.root();
        s.cumulative_gas = cumulative_gas;
        s.block_gas_used = tip_.cumulative_gas;
        s.block_hash_tree_root = tree_.root();
        s.tx_trie_root = tx_trie.root();
        s.receipt_trie_root = receipt_trie.root();
        inter = oss::make_inter(std::move(s));
        inter_hash = oss::oss_hash(inter);
    };
    auto boundary_deep = [&](std::shared_ptr<const TxContext> tx_ctx, const Receipt* receipt) {
        auto deep = std::make_shared<StepDeep>();
        deep->tx_ctx = std::move(tx_ctx);
        deep->block_ctx = ctx;
        deep->world_store = world_.store();
        deep->codes = world_.codes();
        deep->block_tree = tree_;
        deep->tx_trie = tx_trie;
        deep->receipt_trie = receipt_trie;
        if (receipt) deep->receipt = *receipt;
        return deep;
    };

    emit_state(tip_, boundary_deep(nullptr, nullptr));
    refresh_inter();
    emit_state(inter, boundary_deep(nullptr, nullptr));

    BlockResult result;

    for (const Transaction& tx : txs) {
        if (!transaction_valid(tx)) {
            result.tx_results.push_back({true, {}, 0});
            continue;  // skipped: no state change, no boundary
        }

        std::shared_ptr<const TxContext> tx_ctx;
        if (listener) {
            auto c = std::make_shared<TxContext>();
            c->tx = tx;
            c->block_ctx = ctx;
            c->prior_inter = inter;
            c->prior_inter_hash = inter_hash;
            c->committed_world_root = world_.root();
            c->tx_trie = tx_trie;
            c->receipt_trie = receipt_trie;
            tx_ctx = std::move(c);
        }

        bool regular = !tx.is_create() && [&] {
            auto recipient = world_.account(*tx.to);
            return !recipient || !recipient->has_code();
        }();

        uint64_t gas_used = 0;
        Receipt receipt;
        Bytes return_data;

        if (regular) {
            gas_used = schedule_.intrinsic_cost(tx.data, false);
            auto sender = *world_.account(tx.sender);
            sender.nonce += 1;
            sender.balance -= Word256(tx.gas_price) * gas_used + tx.value;
            world_.put_account(tx.sender, sender);
            world_.credit(*tx.to, tx.value);
            world_.credit(ctx.coinbase, Word256(tx.gas_price) * gas_used);
            receipt = {1, cumulative_gas + gas_used, ZERO_HASH};
        } else {
            Hash32 committed_root = world_.root();
            uint64_t intrinsic = schedule_.intrinsic_cost(tx.data, tx.is_create());

            // Gas purchase and nonce bump precede the revert checkpoint.
            auto sender = *world_.account(tx.sender);
            sender.nonce += 1;
            sender.balance -= Word256(tx.gas_price) * tx.gas_limit;
            world_.put_account(tx.sender, sender);

            Execution ex{world_, schedule_, ctx,    tx,    tree_,
                         executed, listener, tx_ctx, committed_root, {}, {}};
            ex.sub.warm_account(tx.sender);

            Frame top;
            top.caller = tx.sender;
            top.value = tx.value;
            top.depth = 1;
            top.gas = tx.gas_limit - intrinsic;
            top.writable = true;
            top.last_depth_hash = listener ? inter_hash : ZERO_HASH;

            if (tx.is_create()) {
                Address new_addr = create_address(tx.sender, tx.nonce);
                ex.sub.warm_account(new_addr);
                top.contract = new_addr;
                top.call_flag = 4;
                top.is_create = true;
                top.input = std::make_shared<const Bytes>();
                top.code = std::make_shared<const Bytes>(tx.data);
                top.code_hash = keccak256(tx.data);
                Account fresh = world_.account(new_addr).value_or(Account{});
                fresh.nonce = 1;
                fresh.code_hash = EMPTY_KECCAK;
                fresh.storage_root = EMPTY_TRIE_ROOT;
                world_.put_account(new_addr, fresh);
            } else {
                ex.sub.warm_account(*tx.to);
                top.contract = *tx.to;
                top.call_flag = 0;
                top.input = std::make_shared<const Bytes>(tx.data);
                auto recipient = world_.account(*tx.to);
                top.code_hash = recipient->code_hash;
                top.code = std::make_shared<const Bytes>(world_.code(top.code_hash));
            }

            top.world_checkpoint = world_;
            top.substate_checkpoint = ex.sub;
            if (tx.value != 0) world_.transfer(tx.sender, top.contract, tx.value);

            ex.frames.push_back(std::move(top));
            TxOutcome outcome = ex.run();

            uint64_t refundable =
                std::min<uint64_t>(static_cast<uint64_t>(std::max<int64_t>(ex.sub.refund, 0)),
                                   (tx.gas_limit - outcome.gas_left) / schedule_.refund_quotient);
            gas_used = tx.gas_limit - outcome.gas_left - refundable;

            auto sender_after = *world_.account(tx.sender);
            sender_after.balance += Word256(tx.gas_price) * (tx.gas_limit - gas_used);
            world_.put_account(tx.sender, sender_after);
            world_.credit(ctx.coinbase, Word256(tx.gas_price) * gas_used);

            if (outcome.kind == ExitKind::Success)
                for (const Address& a : ex.sub.self_destructs) world_.delete_account(a);

            receipt = {outcome.kind == ExitKind::Success ? uint8_t{1} : uint8_t{0},
                       cumulative_gas + gas_used,
                       outcome.kind == ExitKind::Success ? ex.sub.log_chain.head : ZERO_HASH};
            return_data = std::move(outcome.ret);
        }

        cumulative_gas += gas_used;
        tx_trie = tx_trie.update(index_trie_key(executed), BytesView(tx.rlp()));
        receipt_trie = receipt_trie.update(index_trie_key(executed), BytesView(receipt.rlp()));
        ++executed;

        refresh_inter();
        emit_state(inter, boundary_deep(tx_ctx, &receipt));

        result.tx_results.push_back({false, receipt, gas_used, std::move(return_data)});
    }

    Bytes header = encode_block_header(ctx, cumulative_gas, world_.root(), tx_trie.root(),
                                       receipt_trie.root());
    Hash32 block_hash = keccak256(header);
    tree_ = tree_.with_block(ctx.number, block_hash);

    oss::BlockState end;
    end.block_number = ctx.number;
    end.world_root = world_.root();
    end.cumulative_gas = tip_.cumulative_gas + cumulative_gas;
    end.block_hash_tree_root = tree_.root();
    tip_ = end;

    emit_state(tip_, boundary_deep(nullptr, nullptr));

    result.world_root = world_.root();
    result.tx_trie_root = tx_trie.root();
    result.receipt_trie_root = receipt_trie.root();
    result.block_hash = block_hash;
    result.gas_used = cumulative_gas;
    result.end_state = tip_;
    return result;
}

}  // namespace fpvm::evm

// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#include "fpvm/osp/transition.hpp"

#include "fpvm/evm/interpreter.hpp"
#include "fpvm/evm/opcodes.hpp"

namespace fpvm::osp {

namespace {

using namespace fpvm::evm;

struct Reject {
    Verdict v;
};

[[noreturn]] void reject(RejectReason r, std::string detail) {
    throw Reject{Verdict::reject(r, std::move(detail))};
}

Bytes address_key(const Address& a) { return Bytes(a.bytes.begin(), a.bytes.end()); }

uint8_t code_at(BytesView code, uint64_t pc) {
    return pc < code.size() ? code[pc] : uint8_t{OP_STOP};
}

bool jumpdest_ok(BytesView code, uint64_t target) {
    if (target >= code.size() || code[target] != OP_JUMPDEST) return false;
    for (size_t i = 0; i < code.size(); ++i) {
        if (i == target) return true;
        if (is_push(code[i])) {
            size_t skip = code[i] - OP_PUSH1 + 1;
            if (target <= i + skip) return false;  // inside immediate data
            i += skip;
        }
    }
    return false;
}

// Driver for one transition: wraps the cursor with rejecting accessors and
// carries the context.
struct Sim {
    const VerificationContext& C;
    ProofCursor& cur;
    const GasSchedule& g;

    // ---- cursor accessors ----

    StackProofData take_stack(size_t delta) {
        auto p = cur.take_stack(delta);
        if (!p) reject(RejectReason::MalformedProof, "missing stack proof");
        return std::move(*p);
    }
    MemSpanProof take_mem(MemTarget t, uint64_t off, uint64_t len, uint64_t new_len) {
        auto p = cur.take_mem(t, off, len, new_len);
        if (!p) reject(RejectReason::MalformedProof, "missing memory proof");
        return std::move(*p);
    }
    MptProof take_path(const Hash32& root, const Bytes& key, bool is_delete) {
        auto p = cur.take_path(root, key, is_delete);
        if (!p) reject(RejectReason::MalformedProof, "missing trie proof");
        return std::move(*p);
    }
    MptProof take_access(const Hash32& root, const Address& a, std::optional<Word256> slot) {
        auto p = cur.take_access(root, a, slot);
        if (!p) reject(RejectReason::MalformedProof, "missing access proof");
        return std::move(*p);
    }
    Bytes take_bytecode(const Hash32& code_hash) {
        auto p = cur.take_bytecode(code_hash);
        if (!p) reject(RejectReason::OpcodeProofFailure, "missing bytecode");
        if (keccak256(*p) != code_hash)
            reject(RejectReason::OpcodeProofFailure, "bytecode hash mismatch");
        return std::move(*p);
    }
    Bytes take_code(const Hash32& code_hash) {
        auto p = cur.take_code(code_hash);
        if (!p) reject(RejectReason::SubProofFailure, "missing code proof");
        if (keccak256(*p) != code_hash)
            reject(RejectReason::SubProofFailure, "code hash mismatch");
        return std::move(*p);
    }
    oss::IntraState take_caller(const Hash32& expected_hash) {
        auto p = cur.take_caller();
        if (!p) reject(RejectReason::MalformedProof, "missing caller state proof");
        if (oss::oss_hash(*p) != expected_hash)
            reject(RejectReason::SubProofFailure, "caller state hash mismatch");
        return std::move(*p);
    }
    oss::InterState take_prior_inter(const Hash32& expected_hash) {
        auto p = cur.take_prior_inter();
        if (!p) reject(RejectReason::MalformedProof, "missing prior inter-state proof");
        if (oss::oss_hash(*p) != expected_hash)
            reject(RejectReason::SubProofFailure, "prior inter-state hash mismatch");
        return std::move(*p);
    }
    BlockHashProofData take_blockhash(const Hash32& root, uint64_t leaf_index) {
        auto p = cur.take_blockhash();
        if (!p) reject(RejectReason::MalformedProof, "missing block-hash proof");
        if (p->path.size() != BlockHashTree::kDepth ||
            BlockHashTree::root_from_path(leaf_index, p->old_leaf, p->path) != root)
            reject(RejectReason::SubProofFailure, "block-hash tree proof mismatch");
        return std::move(*p);
    }
    std::vector<Address> take_address_list(const Hash32& chain_head) {
        auto p = cur.take_address_list();
        if (!p) reject(RejectReason::MalformedProof, "missing self-destruct list");
        Hash32 head = ZERO_HASH;
        for (const Address& a : *p) head = hashchain_append(head, BytesView(a.bytes));
        if (head != chain_head)
            reject(RejectReason::SubProofFailure, "self-destruct chain mismatch");
        return std::move(*p);
    }

    // ---- trie helpers ----

    std::optional<Bytes> path_read(const Hash32& root, const Bytes& key, const MptProof& p) {
        auto got = mpt_verify_read(root, key, p);
        if (!got) reject(RejectReason::SubProofFailure, "unverifiable trie path");
        return *got;
    }
    Hash32 path_write(const Hash32& root, const Bytes& key, std::optional<BytesView> value,
                      const MptProof& p) {
        auto got = mpt_apply_write(root, key, value, p);
        if (!got) reject(RejectReason::SubProofFailure, "unverifiable trie write");
        return *got;
    }

    struct AccountPath {
        std::optional<Account> account;
        MptProof proof;
        Bytes key;
    };
    AccountPath open_account(const Hash32& world, const Address& a, bool is_delete = false) {
        AccountPath out;
        out.key = account_trie_key(a);
        out.proof = take_path(world, out.key, is_delete);
        auto raw = path_read(world, out.key, out.proof);
        if (raw) {
            out.account = Account::from_rlp(*raw);
            if (!out.account) reject(RejectReason::SubProofFailure, "undecodable account");
        }
        return out;
    }
    Hash32 write_account(const Hash32& world, const AccountPath& path, const Account& acct) {
        return path_write(world, path.key, BytesView(acct.rlp()), path.proof);
    }
    Hash32 delete_account(const Hash32& world, const AccountPath& path) {
        return path_write(world, path.key, std::nullopt, path.proof);
    }

    // Warm/cold probe plus the corresponding access-trie update.
    struct AccessTouch {
        bool was_warm = false;       // address warm (and slot warm when given)
        Hash32 new_root;
    };
    AccessTouch touch(const Hash32& access_root, const Address& a,
                      std::optional<Word256> slot) {
        MptProof proof = take_access(access_root, a, slot);
        Bytes key = address_key(a);
        auto raw = mpt_verify_read(access_root, key, proof);
        if (!raw) reject(RejectReason::SubProofFailure, "unverifiable access path");
        std::set<Word256> slots;
        bool addr_present = raw->has_value();
        if (addr_present) {
            auto decoded = access_entry_slots(**raw);
            if (!decoded) reject(RejectReason::SubProofFailure, "undecodable access entry");
            slots = std::move(*decoded);
        }
        AccessTouch out;
        out.was_warm = slot ? (addr_present && slots.contains(*slot)) : addr_present;
        bool changed = !addr_present;
        if (slot) changed |= slots.insert(*slot).second;
        if (changed) {
            auto applied = mpt_apply_write(access_root, key, BytesView(access_entry_rlp(slots)),
                                           proof);
            if (!applied) reject(RejectReason::SubProofFailure, "unverifiable access write");
            out.new_root = *applied;
        } else {
            out.new_root = access_root;
        }
        return out;
    }

    // ---- context ----

    const VerificationContext::BlockData& block_data(uint64_t number) {
        const auto* b = C.block(number);
        if (!b) reject(RejectReason::ContextMissing, "no context for block");
        return *b;
    }
    const Transaction& tx_at(uint64_t number, uint64_t index) {
        const auto* t = C.tx(number, index);
        if (!t) reject(RejectReason::ContextMissing, "no transaction in context");
        return *t;
    }
};

// ---- memory helpers over span proofs ----

Bytes checked_mem_read(Sim& sim, MemTarget target, const Hash32& root, uint64_t committed_len,
                       uint64_t off, uint64_t len) {
    MemSpanProof span = sim.take_mem(target, off, len, committed_len);
    if (span.old_len != committed_len || span.new_len != committed_len)
        reject(RejectReason::SubProofFailure, "memory proof length mismatch");
    auto got = mem_verify_read(root, off, len, span);
    if (!got) reject(RejectReason::SubProofFailure, "unverifiable memory read");
    return std::move(*got);
}

Hash32 checked_mem_write(Sim& sim, MemTarget target, const Hash32& root, uint64_t committed_len,
                         uint64_t off, BytesView content, uint64_t new_len) {
    MemSpanProof span = sim.take_mem(target, off, content.size(), new_len);
    if (span.old_len != committed_len || span.new_len != new_len)
        reject(RejectReason::SubProofFailure, "memory proof length mismatch");
    auto got = mem_apply_write(root, off, content, span);
    if (!got) reject(RejectReason::SubProofFailure, "unverifiable memory write");
    return *got;
}

Hash32 checked_mem_grow(Sim& sim, const Hash32& root, uint64_t committed_len, uint64_t new_len) {
    if (new_len == committed_len) return root;
    return checked_mem_write(sim, MemTarget::Memory, root, committed_len, 0, {}, new_len);
}

Hash32 fold_push(const Hash32& h0, std::span<const Word256> pushed) {
    Hash32 acc = h0;
    for (const Word256& w : pushed) acc = stack_hash_push(acc, w);
    return acc;
}

// ---- the instruction simulator ----

struct OpEffects {  // components after the op's own effects
    Hash32 world;
    Hash32 access;
    Hash32 log_head;
    Hash32 sd_head;
    uint64_t refund = 0;
};

struct SimExit {  // the frame (and for depth 1, the transaction) ends
    int status = -1;  // 1 success, 0 revert, -1 exceptional halt
    Bytes ret;
    uint64_t gas_left = 0;
    OpEffects fx;
};

using SimResult = std::variant<oss::IntraState, SimExit>;

struct InstructionSim {
    Sim& sim;
    const GasSchedule& g;
    oss::IntraState s;  // pre, normalized; mutated toward the post state
    const Transaction& tx;
    const BlockContext& ctx;

    Bytes code;
    StackProofData stack;
    bool have_stack = false;
    uint64_t stack_size = 0;  // running size

    InstructionSim(Sim& sim_, oss::IntraState pre, const Transaction& tx_,
                   const BlockContext& ctx_)
        : sim(sim_), g(sim_.g), s(std::move(pre)), tx(tx_), ctx(ctx_) {}

    const Word256& operand(size_t i) const { return stack.popped[i]; }
    uint64_t operand_u64(size_t i) const { return w256_to_u64_saturated(operand(i)); }

    // Exceptional halt: the frame dies with all its gas.
    SimResult halt() { return finish_exit({-1, {}, 0, current_effects()}); }

    OpEffects current_effects() const {
        return {s.world_root, s.access_list_root, s.log_head, s.self_destruct_head, s.refund};
    }

    uint64_t expansion_words(uint64_t off, uint64_t size) const {
        return std::max(s.memory_size / 32, words_to_cover(off, size));
    }

    SimResult run() {
        code = sim.take_bytecode(s.code_hash);
        uint8_t op = code_at(code, s.pc);
        if (op != s.opcode) reject(RejectReason::OpcodeProofFailure, "opcode mismatch");
        const OpcodeInfo& info = opcode_info(op);

        if (!info.supported || op == OP_INVALID) return halt();
        if (s.stack.size < info.delta) return halt();
        if (s.stack.size - info.delta + info.alpha > g.stack_limit) return halt();

        stack_size = s.stack.size;
        if (info.delta > 0 || info.alpha > 0) {
            stack = sim.take_stack(info.delta);
            if (stack.popped.size() != info.delta)
                reject(RejectReason::SubProofFailure, "stack proof arity mismatch");
            auto check = stack_proof_apply(s.stack.hash, stack.h0, stack.popped, {});
            if (!check) reject(RejectReason::SubProofFailure, "stack membership mismatch");
            have_stack = true;
            stack_size -= info.delta;
        } else {
            stack.h0 = s.stack.hash;
        }

        if (!s.writable && (is_write_op(op) || (op == OP_CALL && operand(2) != 0)))
            return halt();

        return dispatch(op, info);
    }

    // Applies gas for `cost`; true when affordable.
    bool charge(uint64_t cost) {
        if (cost > s.gas) return false;
        s.gas -= cost;
        return true;
    }

    // Continue in the same frame: push results, advance pc, finish the view.
    SimResult proceed(std::span<const Word256> pushed, uint64_t pc_advance = 1) {
        s.stack.hash = fold_push(stack.h0, pushed);
        s.stack.size = stack_size + pushed.size();
        s.pc += pc_advance;
        s.opcode = code_at(code, s.pc);
        return s;
    }

    SimResult dispatch(uint8_t op, const OpcodeInfo& info);

    // ---- frame exits (shared by terminal opcodes and faults) ----

    // For depth 1 the exit escapes to the transaction-finalize layer; for
    // deeper frames the caller state reopens and execution resumes there.
    SimResult finish_exit(SimExit exit) {
        bool is_create_frame = s.call_flag == 4 || s.call_flag == 5;
        if (exit.status == 1 && is_create_frame && s.depth > 1) {
            // Nested creation: code deposit settles as the frame pops.
            uint64_t deposit = saturating_mul(g.code_deposit_byte_cost, exit.ret.size());
            if (exit.ret.size() > g.max_code_size || deposit > exit.gas_left) {
                exit.status = -1;
                exit.gas_left = 0;
                exit.ret.clear();
            } else {
                exit.gas_left -= deposit;
                auto created = sim.open_account(exit.fx.world, s.contract);
                if (!created.account)
                    reject(RejectReason::SubProofFailure, "created account missing");
                Account updated = *created.account;
                updated.code_hash = keccak256(exit.ret);
                exit.fx.world = sim.write_account(exit.fx.world, created, updated);
            }
        }
        if (s.depth == 1) return exit;

        oss::IntraState caller = sim.take_caller(s.last_depth_hash);
        Bytes caller_code = sim.take_code(caller.code_hash);

        oss::IntraState resumed = caller;
        resumed.gas = caller.gas + (exit.status == -1 ? 0 : exit.gas_left);
        resumed.pc = caller.pc + 1;
        resumed.opcode = code_at(caller_code, resumed.pc);

        Word256 push_value;
        if (is_create_frame)
            push_value = exit.status == 1 ? w256_from_address(s.contract) : Word256(0);
        else
            push_value = exit.status == 1 ? Word256(1) : Word256(0);
        resumed.stack.hash = stack_hash_push(caller.stack.hash, push_value);
        resumed.stack.size = caller.stack.size + 1;

        // Return data of the caller frame.
        Bytes visible_ret;
        if (is_create_frame) {
            if (exit.status == 0) visible_ret = exit.ret;
        } else if (exit.status != -1) {
            visible_ret = exit.ret;
        }
        resumed.return_size = visible_ret.size();
        resumed.return_root = memory_root(visible_ret);

        // Copy into the caller's out region (calls only, not creations).
        resumed.memory_size = caller.memory_size;
        resumed.memory_root = caller.memory_root;
        if (!is_create_frame && exit.status != -1) {
            uint64_t n = std::min<uint64_t>(s.out_size, exit.ret.size());
            if (n > 0) {
                resumed.memory_root = checked_mem_write(
                    sim, MemTarget::CallerMemory, caller.memory_root, caller.memory_size,
                    s.out_offset, BytesView(exit.ret.data(), n), caller.memory_size);
            }
        }

        if (exit.status == 1) {
            resumed.world_root = exit.fx.world;
            resumed.access_list_root = exit.fx.access;
            resumed.log_head = exit.fx.log_head;
            resumed.self_destruct_head = exit.fx.sd_head;
            resumed.refund = exit.fx.refund;
        } else {
            // Revert and halt restore the checkpoint frozen at the call.
            resumed.world_root = caller.world_root;
            resumed.access_list_root = caller.access_list_root;
            resumed.log_head = caller.log_head;
            resumed.self_destruct_head = caller.self_destruct_head;
            resumed.refund = caller.refund;
        }
        return resumed;
    }
};

// The dispatch body lives below; first the inter-transaction machinery.

struct Transitions {
    Sim& sim;
    const GasSchedule& g;

    explicit Transitions(Sim& s) : sim(s), g(s.g) {}

    // ---- helpers shared by the inter-transaction paths ----

    Hash32 build_input_root(BytesView data) { return memory_root(data); }

    Hash32 initial_access_root(const Address& sender, const Address& target) {
        Mpt trie;
        trie = trie.update(address_key(sender), BytesView(access_entry_rlp({})));
        trie = trie.update(address_key(target), BytesView(access_entry_rlp({})));
        return trie.root();
    }

    void check_tx_validity(const Transaction& tx, const std::optional<Account>& sender) {
        uint64_t nonce = sender ? sender->nonce : 0;
        Word256 balance = sender ? sender->balance : 0;
        if (tx.nonce != nonce)
            reject(RejectReason::SimulationDivergence, "sender nonce mismatch");
        if (Word512(tx.gas_price) * tx.gas_limit + Word512(tx.value) > Word512(balance))
            reject(RejectReason::SimulationDivergence, "insufficient sender balance");
        if (tx.gas_limit < g.intrinsic_cost(tx.data, tx.is_create()))
            reject(RejectReason::SimulationDivergence, "gas limit below intrinsic cost");
    }

    // ---- block initiation: field derivation only ----

    TransitionOutcome block_init(const oss::BlockState& pre) {
        oss::InterState post;
        post.block_number = pre.block_number + 1;
        post.tx_index = 0;
        post.world_root = pre.world_root;
        post.cumulative_gas = 0;
        post.block_gas_used = pre.cumulative_gas;
        post.block_hash_tree_root = pre.block_hash_tree_root;
        post.tx_trie_root = EMPTY_TRIE_ROOT;
        post.receipt_trie_root = EMPTY_TRIE_ROOT;
        sim.block_data(post.block_number);  // context must exist to continue
        return {oss::StepKind::BlockInit, post};
    }

    // ---- block finalization: header reconstruction and tree update ----

    TransitionOutcome block_finalize(const oss::InterState& pre) {
        const auto& data = sim.block_data(pre.block_number);
        if (pre.tx_index != data.txs.size())
            reject(RejectReason::SimulationDivergence, "block finalized early");
        Bytes header = encode_block_header(data.ctx, pre.cumulative_gas, pre.world_root,
                                           pre.tx_trie_root, pre.receipt_trie_root);
        Hash32 block_hash = keccak256(header);
        uint64_t leaf = pre.block_number % BlockHashTree::kLeaves;
        BlockHashProofData proof = sim.take_blockhash(pre.block_hash_tree_root, leaf);
        Hash32 new_tree = BlockHashTree::root_from_path(leaf, block_hash, proof.path);

        oss::BlockState post;
        post.block_number = pre.block_number;
        post.world_root = pre.world_root;
        post.cumulative_gas = pre.block_gas_used + pre.cumulative_gas;
        post.block_hash_tree_root = new_tree;
        return {oss::StepKind::BlockFinalize, post};
    }

    // ---- transaction initiation and fused regular transactions ----

    TransitionOutcome from_inter(const oss::InterState& pre) {
        const auto& data = sim.block_data(pre.block_number);
        if (pre.tx_index >= data.txs.size()) return block_finalize(pre);
        const Transaction& tx = data.txs[pre.tx_index];

        auto sender = sim.open_account(pre.world_root, tx.sender);
        check_tx_validity(tx, sender.account);

        Address target = tx.is_create() ? create_address(tx.sender, tx.nonce) : *tx.to;
        auto recipient_probe_root = pre.world_root;  // sender not yet written
        auto recipient = sim.open_account(recipient_probe_root, target);

        bool regular = !tx.is_create() &&
                       (!recipient.account || !recipient.account->has_code());
        if (regular) return regular_tx(pre, tx, sender, recipient);
        if (tx.is_create() && recipient.account &&
            (recipient.account->nonce != 0 || recipient.account->code_hash != EMPTY_KECCAK))
            reject(RejectReason::SimulationDivergence, "creation address collision");
        return tx_init(pre, tx, target, sender, recipient);
    }

    TransitionOutcome regular_tx(const oss::InterState& pre, const Transaction& tx,
                                 const Sim::AccountPath& sender_path,
                                 const Sim::AccountPath& recipient_path) {
        uint64_t used = g.intrinsic_cost(tx.data, false);

        Account sender = *sender_path.account;
        sender.nonce += 1;
        sender.balance -= Word256(tx.gas_price) * used + tx.value;
        Hash32 world = sim.write_account(pre.world_root, sender_path, sender);

        if (tx.value != 0 || recipient_path.account) {
            // Recipient path was opened against the pre-sender-write root;
            // reopen against the current root for the value credit.
            auto recipient = sim.open_account(world, *tx.to);
            Account acct = recipient.account.value_or(Account{});
            if (tx.value != 0 || recipient.account) {
                acct.balance += tx.value;
                world = sim.write_account(world, recipient, acct);
            }
        }
        world = credit(world, sim.block_data(pre.block_number).ctx.coinbase,
                       Word256(tx.gas_price) * used);

        Receipt receipt{1, pre.cumulative_gas + used, ZERO_HASH};
        oss::InterState post = insert_tx_outputs(pre, tx, receipt, world);
        return {oss::StepKind::RegularTx, post};
    }

    Hash32 credit(Hash32 world, const Address& a, const Word256& amount) {
        if (amount == 0) return world;  // zero credits change nothing
        auto path = sim.open_account(world, a);
        Account acct = path.account.value_or(Account{});
        acct.balance += amount;
        return sim.write_account(world, path, acct);
    }

    oss::InterState insert_tx_outputs(const oss::InterState& pre, const Transaction& tx,
                                      const Receipt& receipt, const Hash32& world) {
        Bytes key = index_trie_key(pre.tx_index);
        MptProof tx_proof = sim.take_path(pre.tx_trie_root, key, false);
        Hash32 tx_root = sim.path_write(pre.tx_trie_root, key, BytesView(tx.rlp()), tx_proof);
        MptProof rc_proof = sim.take_path(pre.receipt_trie_root, key, false);
        Hash32 rc_root =
            sim.path_write(pre.receipt_trie_root, key, BytesView(receipt.rlp()), rc_proof);

        oss::InterState post = pre;
        post.tx_index = pre.tx_index + 1;
        post.world_root = world;
        post.cumulative_gas = receipt.cumulative_gas;
        post.tx_trie_root = tx_root;
        post.receipt_trie_root = rc_root;
        return post;
    }

    TransitionOutcome tx_init(const oss::InterState& pre, const Transaction& tx,
                              const Address& target, const Sim::AccountPath& sender_path,
                              const Sim::AccountPath& recipient_path) {
        uint64_t intrinsic = g.intrinsic_cost(tx.data, tx.is_create());

        Account sender = *sender_path.account;
        sender.nonce += 1;
        sender.balance -= Word256(tx.gas_price) * tx.gas_limit + tx.value;
        Hash32 world = sim.write_account(pre.world_root, sender_path, sender);

        Bytes code;
        Hash32 code_hash;
        if (tx.is_create()) {
            Account fresh = recipient_path.account.value_or(Account{});
            fresh.nonce = 1;
            fresh.code_hash = EMPTY_KECCAK;
            fresh.storage_root = EMPTY_TRIE_ROOT;
            fresh.balance += tx.value;
            auto created = sim.open_account(world, target);
            world = sim.write_account(world, created, fresh);
            code = tx.data;
            code_hash = keccak256(code);
        } else {
            code_hash = recipient_path.account->code_hash;
            code = sim.take_bytecode(code_hash);
            if (tx.value != 0) {
                auto recipient = sim.open_account(world, target);
                Account acct = *recipient.account;
                acct.balance += tx.value;
                world = sim.write_account(world, recipient, acct);
            }
        }

        oss::IntraState post;
        post.block_number = pre.block_number;
        post.tx_index = pre.tx_index;
        post.depth = 1;
        post.gas = tx.gas_limit - intrinsic;
        post.refund = 0;
        post.last_depth_hash = oss::oss_hash(pre);
        post.contract = target;
        post.caller = tx.sender;
        post.value = tx.value;
        post.call_flag = tx.is_create() ? 4 : 0;
        post.writable = true;
        post.out_offset = 0;
        post.out_size = 0;
        post.code_hash = code_hash;
        post.pc = 0;
        post.opcode = code_at(code, 0);
        post.stack = {ZERO_HASH, 0};
        post.memory_size = 0;
        post.memory_root = ZERO_HASH;
        post.input_size = tx.is_create() ? 0 : tx.data.size();
        post.input_root = tx.is_create() ? ZERO_HASH : build_input_root(tx.data);
        post.return_size = 0;
        post.return_root = ZERO_HASH;
        post.world_root = world;
        post.committed_world_root = pre.world_root;
        post.self_destruct_head = ZERO_HASH;
        post.access_list_root = initial_access_root(tx.sender, target);
        post.log_head = ZERO_HASH;
        post.block_hash_tree_root = pre.block_hash_tree_root;
        return {oss::StepKind::TxInit, post};
    }

    // ---- transaction finalization ----

    TransitionOutcome tx_finalize(const oss::IntraState& pre, const Transaction& tx,
                                  SimExit exit) {
        const auto& data = sim.block_data(pre.block_number);
        oss::InterState prior = sim.take_prior_inter(pre.last_depth_hash);
        if (prior.block_number != pre.block_number || prior.tx_index != pre.tx_index ||
            prior.world_root != pre.committed_world_root ||
            prior.block_hash_tree_root != pre.block_hash_tree_root)
            reject(RejectReason::SubProofFailure, "prior inter-state inconsistent");

        bool is_create = tx.is_create();
        Hash32 world;
        Hash32 log_head;
        uint64_t refund_counter;

        if (exit.status == 1 && is_create) {
            // Top-level creation: deposit the returned runtime code.
            uint64_t deposit = saturating_mul(g.code_deposit_byte_cost, exit.ret.size());
            if (exit.ret.size() > g.max_code_size || deposit > exit.gas_left) {
                exit.status = -1;
                exit.gas_left = 0;
                exit.ret.clear();
            } else {
                exit.gas_left -= deposit;
                auto created = sim.open_account(exit.fx.world, pre.contract);
                if (!created.account)
                    reject(RejectReason::SubProofFailure, "created account missing");
                Account updated = *created.account;
                updated.code_hash = keccak256(exit.ret);
                exit.fx.world = sim.write_account(exit.fx.world, created, updated);
            }
        }

        if (exit.status == 1) {
            world = exit.fx.world;
            log_head = exit.fx.log_head;
            refund_counter = exit.fx.refund;
        } else {
            // Failed transactions revert to the checkpoint: the prior world
            // plus the nonce bump and the gas purchase.
            auto sender0 = sim.open_account(prior.world_root, tx.sender);
            if (!sender0.account) reject(RejectReason::SubProofFailure, "sender missing");
            Account sender = *sender0.account;
            sender.nonce += 1;
            sender.balance -= Word256(tx.gas_price) * tx.gas_limit;
            world = sim.write_account(prior.world_root, sender0, sender);
            log_head = ZERO_HASH;
            refund_counter = 0;
        }

        uint64_t gas_left = exit.status == -1 ? 0 : exit.gas_left;
        uint64_t refundable =
            std::min<uint64_t>(refund_counter, (tx.gas_limit - gas_left) / g.refund_quotient);
        uint64_t gas_used = tx.gas_limit - gas_left - refundable;

        world = credit(world, tx.sender, Word256(tx.gas_price) * (tx.gas_limit - gas_used));
        world = credit(world, data.ctx.coinbase, Word256(tx.gas_price) * gas_used);

        if (exit.status == 1) {
            auto destroyed = sim.take_address_list(exit.fx.sd_head);
            for (const Address& a : destroyed) {
                auto path = sim.open_account(world, a, /*is_delete=*/true);
                world = sim.delete_account(world, path);
            }
        }

        Receipt receipt{exit.status == 1 ? uint8_t{1} : uint8_t{0},
                        prior.cumulative_gas + gas_used,
                        exit.status == 1 ? log_head : ZERO_HASH};
        oss::InterState post = insert_tx_outputs(prior, tx, receipt, world);
        return {oss::StepKind::TxFinalize, post};
    }
};

}  // namespace

// The per-opcode dispatch: mirrors the interpreter's check order (opcode
// validity, stack bounds, static flag, gas, opcode-specific faults) over
// partially revealed state.
InstructionSim::SimResult_dispatch_placeholder();  // see below

std::variant<TransitionOutcome, Verdict> apply_transition(const oss::OneStepState& pre,
                                                          ProofCursor& cursor,
                                                          const VerificationContext& C) {
    Sim sim{C, cursor, C.schedule};
    Transitions tr(sim);
    try {
        TransitionOutcome out = [&]() -> TransitionOutcome {
            if (const auto* b = std::get_if<oss::BlockState>(&pre)) return tr.block_init(*b);
            if (const auto* i = std::get_if<oss::InterState>(&pre)) return tr.from_inter(*i);
            const auto& intra = std::get<oss::IntraState>(pre);
            const auto& data = sim.block_data(intra.block_number);
            const Transaction& tx = sim.tx_at(intra.block_number, intra.tx_index);

            oss::IntraState norm = intra;
            if (norm.depth == 1) {
                // Fields omitted from the depth-1 hash are derived from the
                // sequenced transaction, never trusted from the proof.
                norm.contract =
                    tx.is_create() ? create_address(tx.sender, tx.nonce) : *tx.to;
                norm.caller = tx.sender;
                norm.value = tx.value;
                norm.call_flag = tx.is_create() ? 4 : 0;
                norm.writable = true;
                norm.out_offset = 0;
                norm.out_size = 0;
            }

            InstructionSim isim(sim, norm, tx, data.ctx);
            SimResult r = isim.run();
            if (auto* next = std::get_if<oss::IntraState>(&r))
                return {oss::StepKind::Instruction, std::move(*next)};
            return tr.tx_finalize(norm, tx, std::move(std::get<SimExit>(r)));
        }();
        if (!cursor.finished())
            return Verdict::reject(RejectReason::MalformedProof, "trailing subproofs");
        return out;
    } catch (const Reject& r) {
        return r.v;
    }
}

}  // namespace fpvm::osp

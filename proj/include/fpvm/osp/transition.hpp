// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include "fpvm/osp/proof.hpp"

namespace fpvm::osp {

// Source of proof material for one transition. The verifier's cursor pops
// decoded subproofs and rejects on tag mismatch; the prover's cursor
// synthesizes each subproof from captured execution data and records it.
// Both sides run the exact same simulation, which is what keeps the emitted
// and expected compositions aligned.
class ProofCursor {
public:
    virtual ~ProofCursor() = default;

    // Trie nodes created by writes earlier in the same transition; proofs
    // for later paths may resolve through them instead of shipping them.
    virtual void attach_scratch(const MptNodeSource* scratch) { (void)scratch; }

    virtual std::optional<StackProofData> take_stack(size_t delta) = 0;
    virtual std::optional<MemSpanProof> take_mem(MemTarget target, uint64_t offset,
                                                 uint64_t length, uint64_t new_len) = 0;
    // One trie path, usable for the read and the follow-up write. Deletions
    // need their collapse witness, hence the flag.
    virtual std::optional<MptProof> take_path(const Hash32& root, const Bytes& key,
                                              bool is_delete) = 0;
    // Access-list opening for an address (and optionally one slot).
    virtual std::optional<MptProof> take_access(const Hash32& root, const Address& addr,
                                                const std::optional<Word256>& slot) = 0;
    virtual std::optional<Bytes> take_bytecode(const Hash32& code_hash) = 0;
    virtual std::optional<Bytes> take_code(const Hash32& code_hash) = 0;
    virtual std::optional<oss::IntraState> take_caller() = 0;
    virtual std::optional<oss::InterState> take_prior_inter() = 0;
    virtual std::optional<BlockHashProofData> take_blockhash(uint64_t leaf_index) = 0;
    virtual std::optional<std::vector<Address>> take_address_list() = 0;
    virtual bool finished() const = 0;
};

struct TransitionOutcome {
    oss::StepKind kind;
    oss::OneStepState post;
};

// Derives the unique valid successor of `pre` under context C, consuming and
// checking proof material from the cursor. All failures are verdicts.
std::variant<TransitionOutcome, Verdict> apply_transition(const oss::OneStepState& pre,
                                                          ProofCursor& cursor,
                                                          const VerificationContext& C);

}  // namespace fpvm::osp

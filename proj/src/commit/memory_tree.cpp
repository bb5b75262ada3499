// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#include "fpvm/commit/memory_tree.hpp"

#include <bit>
#include <functional>

namespace fpvm {

namespace {

Hash32 hash_pair(const Hash32& left, const Hash32& right) {
    return Keccak256().update(left).update(right).final();
}

std::array<uint8_t, 32> offset_word(uint64_t byte_offset) {
    std::array<uint8_t, 32> out{};
    for (int i = 0; i < 8; ++i) out[31 - i] = static_cast<uint8_t>(byte_offset >> (8 * i));
    return out;
}

std::array<uint8_t, 32> cell_at(BytesView data, uint64_t leaf) {
    std::array<uint8_t, 32> cell{};
    uint64_t begin = leaf * 32;
    if (begin < data.size()) {
        size_t n = std::min<uint64_t>(32, data.size() - begin);
        std::memcpy(cell.data(), data.data() + begin, n);
    }
    return cell;
}

// Folds the contiguous revealed leaf range [r0, r1) of a width-`width` tree
// up to the root. Off-path subtrees whose leaves all lie at or past
// `zero_from` are the precomputed zero subtrees; the rest come from
// `sibling(level, index)`. Every proof producer and checker runs this exact
// schedule, which is what lets the pre- and post-state passes share one
// sibling sequence.
template <typename LeafFn, typename SiblingFn>
std::optional<Hash32> fold_range(uint64_t width, uint64_t zero_from, uint64_t r0, uint64_t r1,
                                 std::vector<bool>* schedule, LeafFn&& leaf_value,
                                 SiblingFn&& sibling) {
    if (r0 >= r1 || r1 > width) return std::nullopt;
    std::vector<Hash32> nodes;
    nodes.reserve(r1 - r0 + 2);
    for (uint64_t i = r0; i < r1; ++i) nodes.push_back(leaf_value(i));

    uint64_t a = r0, b = r1;
    unsigned level = 0;
    for (uint64_t w = width; w > 1; w >>= 1, ++level) {
        if (a & 1) {
            auto s = sibling(level, a - 1);
            if (!s) return std::nullopt;
            nodes.insert(nodes.begin(), *s);
            if (schedule) schedule->push_back(true);
            --a;
        }
        if (b & 1) {
            bool padding = (b << level) >= zero_from;
            if (padding) {
                nodes.push_back(zero_subtree(level));
            } else {
                auto s = sibling(level, b);
                if (!s) return std::nullopt;
                nodes.push_back(*s);
            }
            if (schedule) schedule->push_back(!padding);
            ++b;
        }
        std::vector<Hash32> next;
        next.reserve(nodes.size() / 2);
        for (size_t i = 0; i + 1 < nodes.size(); i += 2)
            next.push_back(hash_pair(nodes[i], nodes[i + 1]));
        nodes = std::move(next);
        a >>= 1;
        b >>= 1;
    }
    if (nodes.size() != 1) return std::nullopt;
    return nodes[0];
}

// Root of the old tree re-rooted at a wider power-of-two width: the old root
// folded against all-padding right subtrees.
Hash32 extend_root(Hash32 root, uint64_t old_width, uint64_t new_width) {
    unsigned level = std::countr_zero(old_width);
    for (uint64_t w = old_width; w < new_width; w <<= 1, ++level)
        root = hash_pair(root, zero_subtree(level));
    return root;
}

struct Range {
    uint64_t r0 = 0, r1 = 0;
    bool empty() const { return r0 >= r1; }
};

// Revealed leaves: the span's leaves clipped to the new array, joined with
// the growth region [old leaves, new leaves) whose content is known zero.
Range revealed_range(uint64_t old_len, uint64_t new_len, uint64_t offset, uint64_t length) {
    uint64_t n_old = memory_leaf_count(old_len);
    uint64_t n_new = memory_leaf_count(new_len);
    Range r;
    if (length == 0) {
        if (n_new > n_old) {  // pure growth (does not occur in EVM flows)
            r.r0 = n_old;
            r.r1 = n_new;
        }
        return r;
    }
    uint64_t s0 = offset / 32;
    uint64_t s1 = std::min((offset + length + 31) / 32, n_new);
    if (n_new > n_old) {
        r.r0 = std::min(s0, n_old);
        r.r1 = n_new;
    } else {
        r.r0 = std::min(s0, n_old);
        r.r1 = std::min(s1, n_old);
    }
    return r;
}

struct PassResult {
    Hash32 root;
    size_t consumed = 0;
};

// One reconstruction pass against an explicit sibling list.
std::optional<PassResult> run_pass(const MemSpanProof& proof, uint64_t width, uint64_t zero_from,
                                   const Range& r, std::vector<bool>* schedule,
                                   const std::function<Hash32(uint64_t)>& leaf_value) {
    size_t cursor = 0;
    auto sibling = [&](unsigned, uint64_t) -> std::optional<Hash32> {
        if (cursor >= proof.siblings.size()) return std::nullopt;
        return proof.siblings[cursor++];
    };
    auto root = fold_range(width, zero_from, r.r0, r.r1, schedule, leaf_value, sibling);
    if (!root) return std::nullopt;
    return PassResult{*root, cursor};
}

}  // namespace

Hash32 memory_leaf_hash(uint64_t byte_offset, BytesView cell32) {
    return Keccak256().update(BytesView(offset_word(byte_offset))).update(cell32).final();
}

uint64_t memory_tree_width(uint64_t byte_len) {
    return std::bit_ceil(std::max<uint64_t>(memory_leaf_count(byte_len), 1));
}

Hash32 zero_subtree(unsigned level) {
    static const std::vector<Hash32> table = [] {
        std::vector<Hash32> t;
        t.push_back(ZERO_HASH);
        for (int i = 1; i <= 48; ++i) t.push_back(hash_pair(t.back(), t.back()));
        return t;
    }();
    return table.at(level);
}

Hash32 memory_root(BytesView data) {
    if (data.empty()) return ZERO_HASH;
    uint64_t n = memory_leaf_count(data.size());
    uint64_t width = memory_tree_width(data.size());
    std::vector<Hash32> level;
    level.reserve(width);
    for (uint64_t i = 0; i < n; ++i) level.push_back(memory_leaf_hash(32 * i, cell_at(data, i)));
    level.resize(width, ZERO_HASH);
    while (level.size() > 1) {
        std::vector<Hash32> next;
        next.reserve(level.size() / 2);
        for (size_t i = 0; i < level.size(); i += 2) next.push_back(hash_pair(level[i], level[i + 1]));
        level = std::move(next);
    }
    return level[0];
}

MemSpanProof mem_prove_span(BytesView data, uint64_t offset, uint64_t length, uint64_t new_len) {
    MemSpanProof proof;
    proof.old_len = data.size();
    proof.new_len = new_len;

    uint64_t n_old = memory_leaf_count(data.size());
    uint64_t n_new = memory_leaf_count(new_len);
    uint64_t width = memory_tree_width(std::max<uint64_t>(data.size(), new_len));
    Range r = revealed_range(data.size(), new_len, offset, length);
    if (r.empty()) return proof;

    for (uint64_t i = r.r0; i < std::min(r.r1, n_old); ++i) proof.old_cells.push_back(cell_at(data, i));

    // Old-content tree levels at the extended width, for sibling lookup.
    std::vector<std::vector<Hash32>> levels;
    {
        std::vector<Hash32> leaves;
        leaves.reserve(width);
        for (uint64_t i = 0; i < n_old; ++i)
            leaves.push_back(memory_leaf_hash(32 * i, cell_at(data, i)));
        leaves.resize(width, ZERO_HASH);
        levels.push_back(std::move(leaves));
        while (levels.back().size() > 1) {
            const auto& prev = levels.back();
            std::vector<Hash32> next;
            next.reserve(prev.size() / 2);
            for (size_t i = 0; i < prev.size(); i += 2) next.push_back(hash_pair(prev[i], prev[i + 1]));
            levels.push_back(std::move(next));
        }
    }

    auto leaf_value = [&](uint64_t i) { return levels[0][i]; };
    auto sibling = [&](unsigned level, uint64_t index) -> std::optional<Hash32> {
        proof.siblings.push_back(levels[level][index]);
        return proof.siblings.back();
    };
    uint64_t zero_from = std::max(n_old, n_new);
    auto root = fold_range(width, zero_from, r.r0, r.r1, &proof.schedule, leaf_value, sibling);
    (void)root;
    return proof;
}

std::optional<Bytes> mem_verify_read(const Hash32& root, uint64_t offset, uint64_t length,
                                     const MemSpanProof& proof) {
    if (proof.new_len != proof.old_len) return std::nullopt;
    uint64_t n_old = memory_leaf_count(proof.old_len);
    Range r = revealed_range(proof.old_len, proof.old_len, offset, length);

    Bytes flat;  // revealed cells, concatenated
    if (!r.empty()) {
        if (proof.old_cells.size() != r.r1 - r.r0) return std::nullopt;
        if (n_old == 0) return std::nullopt;
        uint64_t width = memory_tree_width(proof.old_len);
        std::vector<bool> schedule;
        auto leaf_value = [&](uint64_t i) {
            return memory_leaf_hash(32 * i, BytesView(proof.old_cells[i - r.r0]));
        };
        auto pass = run_pass(proof, width, n_old, r, &schedule, leaf_value);
        if (!pass) return std::nullopt;
        if (pass->root != root) return std::nullopt;
        if (pass->consumed != proof.siblings.size()) return std::nullopt;
        if (schedule != proof.schedule) return std::nullopt;
        flat.reserve(proof.old_cells.size() * 32);
        for (const auto& cell : proof.old_cells) append(flat, BytesView(cell));
    } else {
        if (!proof.old_cells.empty() || !proof.siblings.empty() || !proof.schedule.empty())
            return std::nullopt;
        if (proof.old_len == 0 && root != ZERO_HASH) return std::nullopt;
    }

    // Slice [offset, offset+length) out of the revealed cells, zero-extended.
    Bytes out(length, 0);
    uint64_t base = r.r0 * 32;
    for (uint64_t i = 0; i < length; ++i) {
        uint64_t pos = offset + i;
        if (pos >= base && pos - base < flat.size() && pos < proof.old_len) out[i] = flat[pos - base];
    }
    return out;
}

std::optional<Hash32> mem_apply_write(const Hash32& root, uint64_t offset, BytesView content,
                                      const MemSpanProof& proof) {
    if (proof.new_len < proof.old_len) return std::nullopt;
    if (content.size() > 0 && offset + content.size() > proof.new_len) return std::nullopt;
    uint64_t n_old = memory_leaf_count(proof.old_len);
    uint64_t n_new = memory_leaf_count(proof.new_len);
    Range r = revealed_range(proof.old_len, proof.new_len, offset, content.size());
    if (r.empty()) {
        if (!proof.old_cells.empty() || !proof.siblings.empty()) return std::nullopt;
        return root;  // no touched leaves, no growth
    }

    uint64_t revealed_old = std::min(r.r1, n_old) - std::min(r.r0, n_old);
    if (proof.old_cells.size() != revealed_old) return std::nullopt;

    uint64_t width = memory_tree_width(std::max(proof.old_len, proof.new_len));
    uint64_t zero_from = std::max(n_old, n_new);

    auto old_cell = [&](uint64_t i) -> std::array<uint8_t, 32> {
        if (i < n_old) return proof.old_cells[i - r.r0];
        return {};
    };

    std::vector<bool> schedule;
    size_t consumed = 0;
    if (n_old > 0) {
        auto leaf_value = [&](uint64_t i) {
            if (i >= n_old) return ZERO_HASH;  // padding in the pre-state tree
            return memory_leaf_hash(32 * i, BytesView(old_cell(i)));
        };
        auto pass = run_pass(proof, width, zero_from, r, &schedule, leaf_value);
        if (!pass) return std::nullopt;
        uint64_t old_width = memory_tree_width(proof.old_len);
        if (pass->root != extend_root(root, old_width, width)) return std::nullopt;
        if (schedule != proof.schedule) return std::nullopt;
        consumed = pass->consumed;
    } else {
        if (root != ZERO_HASH) return std::nullopt;
    }

    // Post-state pass: splice the written bytes over the revealed cells.
    auto new_leaf_value = [&](uint64_t i) {
        std::array<uint8_t, 32> cell = old_cell(i);
        uint64_t cell_begin = 32 * i;
        for (unsigned k = 0; k < 32; ++k) {
            uint64_t pos = cell_begin + k;
            if (pos >= offset && pos - offset < content.size()) cell[k] = content[pos - offset];
        }
        return memory_leaf_hash(cell_begin, BytesView(cell));
    };
    std::vector<bool> schedule2;
    auto pass = run_pass(proof, width, zero_from, r, &schedule2, new_leaf_value);
    if (!pass) return std::nullopt;
    if (n_old == 0) {
        if (schedule2 != proof.schedule) return std::nullopt;
        consumed = pass->consumed;
    }
    if (consumed != proof.siblings.size() || pass->consumed != consumed) return std::nullopt;
    return pass->root;
}

}  // namespace fpvm

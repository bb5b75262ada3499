// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

// Brute-force recomputation oracles for the commitment schemes. These stay
// independent of the incremental / proof-carrying production paths: the
// memory oracle rebuilds the whole tree from raw bytes, and the trie oracle
// assembles a canonical radix structure in one shot from a sorted map.

#pragma once

#include <map>
#include <optional>

#include "fpvm/commit/memory_tree.hpp"
#include "fpvm/keccak.hpp"
#include "fpvm/rlp.hpp"
#include "fpvm/word256.hpp"

namespace fpvm::test {

inline Hash32 naive_stack_hash(const std::vector<Word256>& stack) {
    Hash32 h{};
    for (const Word256& w : stack) {
        Bytes pre;
        append(pre, h);
        auto b = w256_bytes(w);
        append(pre, BytesView(b));
        h = keccak256(pre);
    }
    return h;
}

inline Hash32 naive_memory_root(BytesView data) {
    if (data.empty()) return Hash32{};
    size_t n_leaves = (data.size() + 31) / 32;
    size_t width = 1;
    while (width < n_leaves) width *= 2;
    std::vector<Hash32> nodes;
    for (size_t i = 0; i < width; ++i) {
        if (i < n_leaves) {
            Bytes pre(32, 0);
            for (int k = 0; k < 8; ++k) pre[31 - k] = static_cast<uint8_t>((32 * i) >> (8 * k));
            Bytes cell(32, 0);
            for (size_t k = 0; k < 32 && 32 * i + k < data.size(); ++k) cell[k] = data[32 * i + k];
            append(pre, cell);
            nodes.push_back(keccak256(pre));
        } else {
            nodes.push_back(Hash32{});
        }
    }
    while (nodes.size() > 1) {
        std::vector<Hash32> up;
        for (size_t i = 0; i < nodes.size(); i += 2) {
            Bytes pre;
            append(pre, nodes[i]);
            append(pre, nodes[i + 1]);
            up.push_back(keccak256(pre));
        }
        nodes = std::move(up);
    }
    return nodes[0];
}

// One-shot trie construction from the complete key set; no incremental
// inserts, no deletion logic.
class NaiveMpt {
public:
    void set(const Bytes& key, const Bytes& value) {
        if (value.empty()) map_.erase(key);
        else map_[key] = value;
    }

    Hash32 root() const {
        std::vector<std::pair<std::vector<uint8_t>, Bytes>> entries;
        for (const auto& [k, v] : map_) {
            std::vector<uint8_t> nibbles;
            for (uint8_t b : k) {
                nibbles.push_back(b >> 4);
                nibbles.push_back(b & 0xf);
            }
            entries.emplace_back(std::move(nibbles), v);
        }
        auto item = build(entries, 0);
        if (!item) {
            uint8_t empty_rlp = 0x80;
            return keccak256(BytesView(&empty_rlp, 1));
        }
        return keccak256(rlp::encode(*item));
    }

private:
    std::map<Bytes, Bytes> map_;

    using Entry = std::pair<std::vector<uint8_t>, Bytes>;

    static Bytes hp(const std::vector<uint8_t>& nibbles, size_t from, size_t to, bool leaf) {
        Bytes out;
        uint8_t flag = leaf ? 2 : 0;
        size_t len = to - from;
        size_t i = from;
        if (len % 2 == 1) {
            out.push_back(static_cast<uint8_t>(((flag | 1) << 4) | nibbles[i]));
            ++i;
        } else {
            out.push_back(static_cast<uint8_t>(flag << 4));
        }
        for (; i < to; i += 2)
            out.push_back(static_cast<uint8_t>((nibbles[i] << 4) | nibbles[i + 1]));
        return out;
    }

    static rlp::Item ref_item(const rlp::Item& node) {
        Bytes enc = rlp::encode(node);
        if (enc.size() < 32) return node;
        return rlp::Item::string(keccak256(enc).bytes);
    }

    // Builds the subtree for entries sharing a prefix of length `depth`.
    static std::optional<rlp::Item> build(std::span<const Entry> entries, size_t depth) {
        if (entries.empty()) return std::nullopt;
        if (entries.size() == 1) {
            const auto& [nib, val] = entries[0];
            return rlp::Item::of({rlp::Item::string(hp(nib, depth, nib.size(), true)),
                                  rlp::Item::string(val)});
        }
        // Longest common run past `depth` across all entries.
        size_t common = entries[0].first.size() - depth;
        for (const Entry& e : entries.subspan(1)) {
            size_t c = 0;
            size_t max = std::min(e.first.size(), entries[0].first.size()) - depth;
            while (c < max && e.first[depth + c] == entries[0].first[depth + c]) ++c;
            common = std::min(common, c);
        }
        if (common > 0) {
            auto below = build(entries, depth + common);
            return rlp::Item::of({rlp::Item::string(hp(entries[0].first, depth, depth + common, false)),
                                  ref_item(*below)});
        }
        // Branch on the nibble at `depth`.
        std::vector<rlp::Item> items(17, rlp::Item::string(Bytes{}));
        size_t i = 0;
        while (i < entries.size()) {
            if (entries[i].first.size() == depth) {  // key exhausted here
                items[16] = rlp::Item::string(entries[i].second);
                ++i;
                continue;
            }
            uint8_t nib = entries[i].first[depth];
            size_t j = i;
            while (j < entries.size() &&
                   entries[j].first.size() > depth && entries[j].first[depth] == nib)
                ++j;
            auto child = build(entries.subspan(i, j - i), depth + 1);
            items[nib] = ref_item(*child);
            i = j;
        }
        return rlp::Item::of(std::move(items));
    }
};

}  // namespace fpvm::test

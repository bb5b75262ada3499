// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#pragma once

#include <optional>

#include "fpvm/bytes.hpp"
#include "fpvm/word256.hpp"

namespace fpvm::rlp {

// Recursive item: a byte string or a list of items.
struct Item {
    enum class Kind : uint8_t { String, List };
    Kind kind = Kind::String;
    Bytes str;
    std::vector<Item> list;

    static Item string(Bytes b) { return Item{Kind::String, std::move(b), {}}; }
    static Item string(BytesView b) { return Item{Kind::String, Bytes(b.begin(), b.end()), {}}; }
    static Item of(std::vector<Item> items) { return Item{Kind::List, {}, std::move(items)}; }
    // Integers encode as their minimal big-endian form (zero = empty string).
    static Item uint(uint64_t v);
    static Item uint(const Word256& v);

    bool is_string() const { return kind == Kind::String; }
    bool is_list() const { return kind == Kind::List; }
    bool operator==(const Item&) const = default;
};

Bytes encode(const Item& item);
Bytes encode_string(BytesView payload);
Bytes encode_uint(uint64_t v);

// Strict decoder: rejects non-canonical length forms, truncation and
// trailing bytes.
std::optional<Item> decode(BytesView data);

// Decode helpers for fixed shapes; nullopt on any mismatch.
std::optional<uint64_t> as_uint64(const Item& item);
std::optional<Word256> as_word256(const Item& item);

}  // namespace fpvm::rlp

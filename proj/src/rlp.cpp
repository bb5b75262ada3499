// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#include "fpvm/rlp.hpp"

namespace fpvm::rlp {

namespace {

void encode_length(Bytes& out, size_t len, uint8_t short_base, uint8_t long_base) {
    if (len < 56) {
        out.push_back(static_cast<uint8_t>(short_base + len));
    } else {
        Bytes be;
        for (size_t v = len; v > 0; v >>= 8) be.insert(be.begin(), static_cast<uint8_t>(v & 0xff));
        out.push_back(static_cast<uint8_t>(long_base + be.size()));
        append(out, be);
    }
}

void encode_into(Bytes& out, const Item& item) {
    if (item.is_string()) {
        if (item.str.size() == 1 && item.str[0] < 0x80) {
            out.push_back(item.str[0]);
            return;
        }
        encode_length(out, item.str.size(), 0x80, 0xb7);
        append(out, item.str);
    } else {
        Bytes payload;
        for (const Item& child : item.list) encode_into(payload, child);
        encode_length(out, payload.size(), 0xc0, 0xf7);
        append(out, payload);
    }
}

struct Cursor {
    BytesView data;
    size_t pos = 0;

    bool done() const { return pos == data.size(); }
    std::optional<uint8_t> peek() const {
        if (done()) return std::nullopt;
        return data[pos];
    }
    std::optional<BytesView> take(size_t n) {
        if (data.size() - pos < n) return std::nullopt;
        BytesView v = data.subspan(pos, n);
        pos += n;
        return v;
    }
};

std::optional<size_t> read_long_length(Cursor& cur, size_t len_of_len) {
    auto be = cur.take(len_of_len);
    if (!be) return std::nullopt;
    if ((*be)[0] == 0) return std::nullopt;  // no leading zeros
    size_t len = 0;
    for (uint8_t b : *be) {
        if (len > (SIZE_MAX >> 8)) return std::nullopt;
        len = (len << 8) | b;
    }
    if (len < 56) return std::nullopt;  // must not fit the short form
    return len;
}

std::optional<Item> decode_item(Cursor& cur) {
    auto first = cur.peek();
    if (!first) return std::nullopt;
    cur.pos++;
    uint8_t b = *first;

    if (b < 0x80) {
        return Item::string(Bytes{b});
    }
    if (b <= 0xb7) {  // short string
        size_t len = b - 0x80;
        auto payload = cur.take(len);
        if (!payload) return std::nullopt;
        if (len == 1 && (*payload)[0] < 0x80) return std::nullopt;  // should self-encode
        return Item::string(*payload);
    }
    if (b <= 0xbf) {  // long string
        auto len = read_long_length(cur, b - 0xb7);
        if (!len) return std::nullopt;
        auto payload = cur.take(*len);
        if (!payload) return std::nullopt;
        return Item::string(*payload);
    }

    size_t len;
    if (b <= 0xf7) {  // short list
        len = b - 0xc0;
    } else {          // long list
        auto l = read_long_length(cur, b - 0xf7);
        if (!l) return std::nullopt;
        len = *l;
    }
    auto payload = cur.take(len);
    if (!payload) return std::nullopt;
    Cursor inner{*payload};
    std::vector<Item> items;
    while (!inner.done()) {
        auto child = decode_item(inner);
        if (!child) return std::nullopt;
        items.push_back(std::move(*child));
    }
    return Item::of(std::move(items));
}

}  // namespace

Item Item::uint(uint64_t v) {
    Bytes be;
    for (; v > 0; v >>= 8) be.insert(be.begin(), static_cast<uint8_t>(v & 0xff));
    return Item::string(std::move(be));
}

Item Item::uint(const Word256& v) {
    auto full = w256_bytes(v);
    unsigned len = w256_byte_length(v);
    return Item::string(BytesView(full.data() + (32 - len), len));
}

Bytes encode(const Item& item) {
    Bytes out;
    encode_into(out, item);
    return out;
}

Bytes encode_string(BytesView payload) { return encode(Item::string(payload)); }
Bytes encode_uint(uint64_t v) { return encode(Item::uint(v)); }

std::optional<Item> decode(BytesView data) {
    Cursor cur{data};
    auto item = decode_item(cur);
    if (!item || !cur.done()) return std::nullopt;
    return item;
}

std::optional<uint64_t> as_uint64(const Item& item) {
    if (!item.is_string() || item.str.size() > 8) return std::nullopt;
    if (!item.str.empty() && item.str[0] == 0) return std::nullopt;  // non-minimal
    uint64_t v = 0;
    for (uint8_t b : item.str) v = (v << 8) | b;
    return v;
}

std::optional<Word256> as_word256(const Item& item) {
    if (!item.is_string() || item.str.size() > 32) return std::nullopt;
    if (!item.str.empty() && item.str[0] == 0) return std::nullopt;
    return w256_from_bytes(item.str);
}

}  // namespace fpvm::rlp

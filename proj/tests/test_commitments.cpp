// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fpvm/commit/block_hash_tree.hpp"
#include "fpvm/commit/hash_chain.hpp"
#include "fpvm/commit/memory_tree.hpp"
#include "fpvm/commit/mpt.hpp"
#include "fpvm/commit/stack_hash.hpp"
#include "support/naive_commit.hpp"

using namespace fpvm;

namespace {

Bytes random_bytes(std::mt19937_64& rng, size_t len) {
    Bytes out(len);
    for (auto& b : out) b = static_cast<uint8_t>(rng());
    return out;
}

Word256 random_word(std::mt19937_64& rng) {
    return w256_from_bytes(random_bytes(rng, 32));
}

}  // namespace

TEST_CASE("stack hash matches fold oracle") {
    std::mt19937_64 rng(11);
    CHECK(stack_hash({}) == ZERO_HASH);

    std::vector<Word256> one = {random_word(rng)};
    Bytes pre;
    append(pre, ZERO_HASH);
    auto b = w256_bytes(one[0]);
    append(pre, BytesView(b));
    CHECK(stack_hash(one) == keccak256(pre));

    for (size_t n : {2u, 17u, 1024u}) {
        std::vector<Word256> stack;
        for (size_t i = 0; i < n; ++i) stack.push_back(random_word(rng));
        CHECK(stack_hash(stack) == test::naive_stack_hash(stack));
    }
}

TEST_CASE("stack proof build and apply") {
    std::mt19937_64 rng(12);
    std::vector<Word256> stack = {1, 2, 3};
    auto proof = stack_proof_build(stack, 2);
    REQUIRE(proof);
    CHECK(proof->h0 == stack_hash(std::vector<Word256>{1}));
    CHECK(proof->popped == std::vector<Word256>{3, 2});

    // ADD shape: pop two, push their sum.
    std::vector<Word256> pushed = {5};
    auto after = stack_proof_apply(proof->h, proof->h0, proof->popped, pushed);
    REQUIRE(after);
    CHECK(*after == stack_hash(std::vector<Word256>{1, 5}));

    // Tampered popped element fails the membership check.
    auto bad = proof->popped;
    bad[0] += 1;
    CHECK_FALSE(stack_proof_apply(proof->h, proof->h0, bad, pushed));

    // Empty case.
    auto empty = stack_proof_build(std::vector<Word256>{}, 0);
    REQUIRE(empty);
    CHECK(empty->h == ZERO_HASH);
    CHECK(empty->h0 == ZERO_HASH);
    auto same = stack_proof_apply(empty->h, empty->h0, {}, {});
    REQUIRE(same);
    CHECK(*same == ZERO_HASH);

    // Underflow is a build-time error.
    CHECK_FALSE(stack_proof_build(std::vector<Word256>{1}, 2));

    // Random round trips.
    for (int i = 0; i < 200; ++i) {
        std::uniform_int_distribution<size_t> size_dist(0, 30);
        size_t n = size_dist(rng);
        std::vector<Word256> s;
        for (size_t k = 0; k < n; ++k) s.push_back(random_word(rng));
        std::uniform_int_distribution<size_t> delta_dist(0, n);
        size_t delta = delta_dist(rng);
        auto p = stack_proof_build(s, delta);
        REQUIRE(p);
        auto h = stack_proof_apply(p->h, p->h0, p->popped, p->popped);
        REQUIRE(h);
        // Re-pushing the popped elements in pop order reverses the segment.
        std::vector<Word256> reversed(s.begin(), s.end() - delta);
        for (size_t k = 0; k < delta; ++k) reversed.push_back(s[s.size() - 1 - k]);
        CHECK(*h == stack_hash(reversed));
    }
}

TEST_CASE("memory root matches naive oracle") {
    std::mt19937_64 rng(13);
    CHECK(memory_root(Bytes{}) == ZERO_HASH);

    Bytes b32 = random_bytes(rng, 32);
    CHECK(memory_root(b32) == memory_leaf_hash(0, b32));  // single leaf

    // 33 bytes: second leaf is offset 32 with a one-byte cell padded by zeros.
    Bytes b33 = random_bytes(rng, 33);
    Bytes cell2(32, 0);
    cell2[0] = b33[32];
    Hash32 leaf0 = memory_leaf_hash(0, BytesView(b33.data(), 32));
    Hash32 leaf1 = memory_leaf_hash(32, cell2);
    CHECK(memory_root(b33) == Keccak256().update(leaf0).update(leaf1).final());
    CHECK(memory_root(b33) == test::naive_memory_root(b33));

    for (size_t len : {1u, 31u, 64u, 65u, 96u, 1000u, 4096u}) {
        Bytes data = random_bytes(rng, len);
        CHECK(memory_root(data) == test::naive_memory_root(data));
    }
}

TEST_CASE("memory span read proofs") {
    std::mt19937_64 rng(14);
    for (int i = 0; i < 300; ++i) {
        std::uniform_int_distribution<size_t> len_dist(1, 700);
        Bytes data = random_bytes(rng, len_dist(rng));
        Hash32 root = memory_root(data);
        std::uniform_int_distribution<uint64_t> off_dist(0, data.size() + 40);
        uint64_t off = off_dist(rng);
        std::uniform_int_distribution<uint64_t> span_dist(0, 120);
        uint64_t len = span_dist(rng);

        auto proof = mem_prove_span(data, off, len, data.size());
        auto got = mem_verify_read(root, off, len, proof);
        REQUIRE(got);
        Bytes expect(len, 0);
        for (uint64_t k = 0; k < len; ++k)
            if (off + k < data.size()) expect[k] = data[off + k];
        CHECK(*got == expect);

        if (!proof.siblings.empty()) {
            auto bad = proof;
            bad.siblings[0][5] ^= 1;
            CHECK_FALSE(mem_verify_read(root, off, len, bad).has_value());
        }
        if (!proof.old_cells.empty()) {
            auto bad = proof;
            bad.old_cells[0][3] ^= 1;
            CHECK_FALSE(mem_verify_read(root, off, len, bad).has_value());
        }
    }
}

TEST_CASE("memory write proofs match naive recomputation") {
    std::mt19937_64 rng(15);
    for (int i = 0; i < 300; ++i) {
        std::uniform_int_distribution<size_t> len_dist(0, 500);
        Bytes data = random_bytes(rng, len_dist(rng));
        // Keep memory word-aligned like the interpreter does.
        data.resize((data.size() + 31) / 32 * 32);
        Hash32 root = memory_root(data);

        std::uniform_int_distribution<uint64_t> off_dist(0, data.size() + 90);
        uint64_t off = off_dist(rng);
        std::uniform_int_distribution<uint64_t> span_dist(1, 100);
        Bytes content = random_bytes(rng, span_dist(rng));
        uint64_t new_len = std::max<uint64_t>(data.size(), (off + content.size() + 31) / 32 * 32);

        auto proof = mem_prove_span(data, off, content.size(), new_len);
        auto new_root = mem_apply_write(root, off, content, proof);
        REQUIRE(new_root);

        Bytes expect = data;
        expect.resize(new_len, 0);
        std::copy(content.begin(), content.end(), expect.begin() + off);
        CHECK(*new_root == test::naive_memory_root(expect));

        if (!proof.siblings.empty()) {
            auto bad = proof;
            bad.siblings.back()[0] ^= 0x80;
            CHECK_FALSE(mem_apply_write(root, off, content, bad).has_value());
        }
    }
}

TEST_CASE("memory write edge cases") {
    std::mt19937_64 rng(16);
    Bytes data = random_bytes(rng, 64);

    // Identity write returns the same root.
    Hash32 root = memory_root(data);
    Bytes same(data.begin(), data.begin() + 32);
    auto proof = mem_prove_span(data, 0, 32, 64);
    auto r = mem_apply_write(root, 0, same, proof);
    REQUIRE(r);
    CHECK(*r == root);

    // Append one word past the end.
    Bytes word = random_bytes(rng, 32);
    auto append_proof = mem_prove_span(data, 64, 32, 96);
    auto r2 = mem_apply_write(root, 64, word, append_proof);
    REQUIRE(r2);
    Bytes grown = data;
    append(grown, word);
    CHECK(*r2 == test::naive_memory_root(grown));

    // Write from empty memory.
    auto from_empty = mem_prove_span(Bytes{}, 64, 32, 96);
    auto r3 = mem_apply_write(ZERO_HASH, 64, word, from_empty);
    REQUIRE(r3);
    Bytes fresh(96, 0);
    std::copy(word.begin(), word.end(), fresh.begin() + 64);
    CHECK(*r3 == test::naive_memory_root(fresh));
}

TEST_CASE("multiproof size bound") {
    std::mt19937_64 rng(17);
    // k revealed leaves of an n-leaf tree: proof bytes within
    // k*32 + ceil(log2 n)*k*32.
    for (size_t total : {256u, 1024u, 4096u}) {
        Bytes data = random_bytes(rng, total);
        for (uint64_t off : {0u, 320u, 992u}) {
            uint64_t len = 96;
            auto proof = mem_prove_span(data, off, len, data.size());
            size_t k = proof.old_cells.size();
            size_t log_n = 0;
            while ((1u << log_n) < memory_leaf_count(total)) ++log_n;
            size_t bytes = proof.old_cells.size() * 32 + proof.siblings.size() * 32;
            CHECK(bytes <= k * 32 + log_n * k * 32);
        }
    }

    // Doubling the data size with a fixed read width costs at most one
    // extra sibling level.
    Bytes small = random_bytes(rng, 512);
    Bytes big = random_bytes(rng, 1024);
    auto p_small = mem_prove_span(small, 128, 64, small.size());
    auto p_big = mem_prove_span(big, 128, 64, big.size());
    CHECK(p_big.siblings.size() <= p_small.siblings.size() + 2);
}

TEST_CASE("mpt basics") {
    Mpt trie;
    CHECK(trie.root() == EMPTY_TRIE_ROOT);

    Bytes key = from_hex("0x010203");
    Bytes value = from_hex("0xaabbcc");
    Mpt t2 = trie.update(key, BytesView(value));
    CHECK(t2.get(key) == value);
    CHECK_FALSE(trie.get(key).has_value());  // old handle unchanged

    // Insert then delete returns the empty root.
    Mpt t3 = t2.update(key, std::nullopt);
    CHECK(t3.root() == EMPTY_TRIE_ROOT);

    // Insertion order does not matter.
    std::mt19937_64 rng(18);
    std::vector<std::pair<Bytes, Bytes>> kvs;
    for (int i = 0; i < 40; ++i)
        kvs.emplace_back(random_bytes(rng, 8), random_bytes(rng, 20));
    Mpt a, b;
    for (const auto& [k, v] : kvs) a = a.update(k, BytesView(v));
    for (auto it = kvs.rbegin(); it != kvs.rend(); ++it) b = b.update(it->first, BytesView(it->second));
    CHECK(a.root() == b.root());
}

TEST_CASE("mpt matches naive oracle on random keys") {
    std::mt19937_64 rng(19);
    Mpt trie;
    test::NaiveMpt oracle;
    std::vector<Bytes> keys;
    for (int i = 0; i < 1000; ++i) {
        std::uniform_int_distribution<size_t> kl(1, 12);
        Bytes key = random_bytes(rng, kl(rng));
        Bytes value = random_bytes(rng, 1 + (rng() % 40));
        keys.push_back(key);
        trie = trie.update(key, BytesView(value));
        oracle.set(key, value);
        if (i % 97 == 0) CHECK(trie.root() == oracle.root());
    }
    CHECK(trie.root() == oracle.root());

    // Delete half of them, in random order.
    std::shuffle(keys.begin(), keys.end(), rng);
    for (size_t i = 0; i < keys.size() / 2; ++i) {
        trie = trie.update(keys[i], std::nullopt);
        oracle.set(keys[i], Bytes{});
        if (i % 83 == 0) CHECK(trie.root() == oracle.root());
    }
    CHECK(trie.root() == oracle.root());
}

TEST_CASE("mpt proofs: read, absence, write") {
    std::mt19937_64 rng(20);
    Mpt trie;
    std::map<Bytes, Bytes> shadow;
    for (int i = 0; i < 200; ++i) {
        Bytes key = keccak256(random_bytes(rng, 4)).bytes.size() == 32
                        ? Bytes(keccak256(random_bytes(rng, 4)).bytes.begin(),
                                keccak256(random_bytes(rng, 4)).bytes.end())
                        : Bytes{};
        key = random_bytes(rng, 6);
        Bytes value = random_bytes(rng, 1 + (rng() % 30));
        trie = trie.update(key, BytesView(value));
        shadow[key] = value;
    }

    // Present key.
    auto it = shadow.begin();
    std::advance(it, 17);
    auto proof = trie.prove(it->first);
    auto got = mpt_verify_read(trie.root(), it->first, proof);
    REQUIRE(got.has_value());
    REQUIRE(got->has_value());
    CHECK(**got == it->second);

    // Absent key.
    Bytes missing = from_hex("0xffffffffffffffffffffff01");
    auto absent_proof = trie.prove(missing);
    auto absent = mpt_verify_read(trie.root(), missing, absent_proof);
    REQUIRE(absent.has_value());
    CHECK_FALSE(absent->has_value());

    // Proof against the wrong root fails.
    Hash32 wrong = trie.root();
    wrong[0] ^= 1;
    CHECK_FALSE(mpt_verify_read(wrong, it->first, proof).has_value());

    //

    // Proof-carrying writes agree with rebuilding the full trie.
    for (int i = 0; i < 300; ++i) {
        Bytes key = (i % 3 == 0 && !shadow.empty()) ? std::next(shadow.begin(),
                                                                rng() % shadow.size())
                                                          ->first
                                                    : random_bytes(rng, 6);
        bool del = (i % 5 == 0);
        std::optional<Bytes> value;
        if (!del) value = random_bytes(rng, 1 + (rng() % 30));

        auto wproof = trie.prove_for_write(key, value ? std::make_optional(BytesView(*value))
                                                      : std::nullopt);
        auto new_root = mpt_apply_write(trie.root(), key,
                                        value ? std::make_optional(BytesView(*value)) : std::nullopt,
                                        wproof);
        REQUIRE(new_root.has_value());

        trie = trie.update(key, value ? std::make_optional(BytesView(*value)) : std::nullopt);
        if (del) shadow.erase(key);
        else shadow[key] = *value;
        CHECK(*new_root == trie.root());

        // And the naive oracle agrees with the incremental trie.
        if (i % 59 == 0) {
            test::NaiveMpt oracle;
            for (const auto& [k, v] : shadow) oracle.set(k, v);
            CHECK(oracle.root() == trie.root());
        }
    }
}

TEST_CASE("mpt secure-style 32-byte keys with deletions") {
    std::mt19937_64 rng(21);
    Mpt trie;
    test::NaiveMpt oracle;
    std::vector<Bytes> keys;
    for (int i = 0; i < 400; ++i) {
        Bytes key(keccak256(random_bytes(rng, 8)).bytes.begin(),
                  keccak256(random_bytes(rng, 8)).bytes.end());
        Bytes value = random_bytes(rng, 1 + (rng() % 60));
        trie = trie.update(key, BytesView(value));
        oracle.set(key, value);
        keys.push_back(key);
    }
    CHECK(trie.root() == oracle.root());
    std::shuffle(keys.begin(), keys.end(), rng);
    for (size_t i = 0; i < keys.size(); ++i) {
        auto wproof = trie.prove_for_write(keys[i], std::nullopt);
        auto applied = mpt_apply_write(trie.root(), keys[i], std::nullopt, wproof);
        REQUIRE(applied.has_value());
        trie = trie.update(keys[i], std::nullopt);
        oracle.set(keys[i], Bytes{});
        CHECK(*applied == trie.root());
        if (i % 101 == 0) CHECK(trie.root() == oracle.root());
    }
    CHECK(trie.root() == EMPTY_TRIE_ROOT);
}

TEST_CASE("hash chain") {
    HashChain chain;
    CHECK(chain.head == ZERO_HASH);
    chain.append(Bytes{});
    Bytes pre(32, 0);
    CHECK(chain.head == keccak256(pre));
    CHECK(chain.length == 1);

    std::mt19937_64 rng(22);
    Bytes x = random_bytes(rng, 40);
    Bytes y = random_bytes(rng, 40);
    HashChain xy, yx;
    xy.append(x);
    xy.append(y);
    yx.append(y);
    yx.append(x);
    CHECK(xy.head != yx.head);  // order sensitive

    // Fold oracle.
    HashChain incremental;
    Hash32 head = ZERO_HASH;
    for (int i = 0; i < 100; ++i) {
        Bytes item = random_bytes(rng, 1 + (rng() % 64));
        incremental.append(item);
        Bytes preimage;
        append(preimage, head);
        append(preimage, item);
        head = keccak256(preimage);
    }
    CHECK(incremental.head == head);
}

TEST_CASE("block hash tree") {
    BlockHashTree tree;
    // Fresh tree commits 256 zero leaves.
    std::vector<Hash32> level(256, ZERO_HASH);
    while (level.size() > 1) {
        std::vector<Hash32> next;
        for (size_t i = 0; i < level.size(); i += 2)
            next.push_back(Keccak256().update(level[i]).update(level[i + 1]).final());
        level = std::move(next);
    }
    CHECK(tree.root() == level[0]);

    std::mt19937_64 rng(23);
    Hash32 h0 = keccak256(random_bytes(rng, 16));
    Hash32 h256 = keccak256(random_bytes(rng, 16));
    auto t1 = tree.with_block(0, h0);
    auto t2 = t1.with_block(256, h256);  // same leaf index, overwrites
    CHECK(t1.leaf(0) == h0);
    CHECK(t2.leaf(0) == h256);
    CHECK(t1.root() != t2.root());

    // Block 300 lands at leaf 44.
    Hash32 h300 = keccak256(random_bytes(rng, 16));
    auto t3 = t2.with_block(300, h300);
    CHECK(t3.leaf(44) == h300);

    // Proof for leaf 17 after random fills.
    auto t4 = t3;
    for (int i = 0; i < 40; ++i) t4 = t4.with_block(rng() % 1000, keccak256(random_bytes(rng, 8)));
    auto path = t4.prove(17);
    CHECK(BlockHashTree::root_from_path(17, t4.leaf(17), path) == t4.root());
    Hash32 perturbed = t4.root();
    perturbed[31] ^= 1;
    CHECK(BlockHashTree::root_from_path(17, t4.leaf(17), path) != perturbed);
}

TEST_CASE("commitment bit-flip fuzz rejects") {
    std::mt19937_64 rng(24);
    // Stack proofs.
    int rejected = 0, total = 0;
    for (int i = 0; i < 250; ++i) {
        std::vector<Word256> s;
        for (int k = 0; k < 8; ++k) s.push_back(random_word(rng));
        auto p = stack_proof_build(s, 3);
        REQUIRE(p);
        Bytes blob;
        append(blob, p->h);
        append(blob, p->h0);
        for (auto& w : p->popped) {
            auto wb = w256_bytes(w);
            append(blob, BytesView(wb));
        }
        size_t bit = rng() % (blob.size() * 8);
        blob[bit / 8] ^= (1 << (bit % 8));
        Hash32 h = hash32_from_bytes(BytesView(blob.data(), 32));
        Hash32 h0 = hash32_from_bytes(BytesView(blob.data() + 32, 32));
        std::vector<Word256> popped;
        for (int k = 0; k < 3; ++k)
            popped.push_back(w256_from_bytes(BytesView(blob.data() + 64 + 32 * k, 32)));
        auto res = stack_proof_apply(h, h0, popped, {});
        ++total;
        // Flips in h or popped must be caught; flips in h0 shift the result.
        if (!res || *res != stack_hash(std::vector<Word256>(s.begin(), s.end() - 3))) ++rejected;
    }
    CHECK(rejected == total);

    // MPT read proofs: flip one bit anywhere in the node list.
    Mpt trie;
    for (int i = 0; i < 60; ++i) {
        Bytes key = random_bytes(rng, 5);
        Bytes val = random_bytes(rng, 12);
        trie = trie.update(key, BytesView(val));
    }
    Bytes probe = random_bytes(rng, 5);
    trie = trie.update(probe, BytesView(probe));
    for (int i = 0; i < 250; ++i) {
        auto proof = trie.prove(probe);
        size_t node = rng() % proof.nodes.size();
        size_t bit = rng() % (proof.nodes[node].size() * 8);
        proof.nodes[node][bit / 8] ^= (1 << (bit % 8));
        auto got = mpt_verify_read(trie.root(), probe, proof);
        bool accepted_same = got.has_value() && got->has_value() && **got == probe;
        CHECK_FALSE(accepted_same);
    }
}

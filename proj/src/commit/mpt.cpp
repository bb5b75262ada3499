// fpvm: an EVM-native one-step fraud proof toolkit.
// Licensed under the Apache License, Version 2.0.

#include "fpvm/commit/mpt.hpp"

#include <set>

namespace fpvm {

namespace {

using Nibbles = std::vector<uint8_t>;

Nibbles to_nibbles(BytesView key) {
    Nibbles out;
    out.reserve(key.size() * 2);
    for (uint8_t b : key) {
        out.push_back(b >> 4);
        out.push_back(b & 0xf);
    }
    return out;
}

size_t common_prefix(std::span<const uint8_t> a, std::span<const uint8_t> b) {
    size_t n = std::min(a.size(), b.size());
    size_t i = 0;
    while (i < n && a[i] == b[i]) ++i;
    return i;
}

// Hex-prefix path encoding (leaf flag and parity in the first nibble).
Bytes hp_encode(std::span<const uint8_t> nibbles, bool leaf) {
    Bytes out;
    uint8_t flag = leaf ? 2 : 0;
    size_t i = 0;
    if (nibbles.size() % 2 == 1) {
        out.push_back(static_cast<uint8_t>(((flag | 1) << 4) | nibbles[0]));
        i = 1;
    } else {
        out.push_back(static_cast<uint8_t>(flag << 4));
    }
    for (; i < nibbles.size(); i += 2)
        out.push_back(static_cast<uint8_t>((nibbles[i] << 4) | nibbles[i + 1]));
    return out;
}

struct HpDecoded {
    Nibbles nibbles;
    bool leaf;
};

HpDecoded hp_decode(BytesView data) {
    if (data.empty()) throw MptError("empty path");
    uint8_t flag = data[0] >> 4;
    if (flag > 3) throw MptError("bad path flag");
    HpDecoded out;
    out.leaf = flag >= 2;
    if (flag & 1) out.nibbles.push_back(data[0] & 0xf);
    else if ((data[0] & 0xf) != 0) throw MptError("bad path padding");
    for (size_t i = 1; i < data.size(); ++i) {
        out.nibbles.push_back(data[i] >> 4);
        out.nibbles.push_back(data[i] & 0xf);
    }
    return out;
}

struct Node;
using NodePtr = std::shared_ptr<const Node>;

// Child reference: absent, by hash, or embedded when the RLP is short.
struct Ref {
    Hash32 hash;
    bool by_hash = false;
    NodePtr embedded;

    bool is_empty() const { return !by_hash && !embedded; }
    static Ref none() { return {}; }
};

struct Node {
    enum class Kind : uint8_t { Leaf, Extension, Branch };
    Kind kind;
    Nibbles path;                    // leaf, extension
    Bytes value;                     // leaf value; branch slot 17 (empty = none)
    Ref child;                       // extension
    std::array<Ref, 16> children{};  // branch
};

rlp::Item node_to_item(const Node& node);

rlp::Item ref_to_item(const Ref& ref) {
    if (ref.is_empty()) return rlp::Item::string(Bytes{});
    if (ref.by_hash) return rlp::Item::string(BytesView(ref.hash.bytes));
    return node_to_item(*ref.embedded);
}

rlp::Item node_to_item(const Node& node) {
    switch (node.kind) {
        case Node::Kind::Leaf:
            return rlp::Item::of(
                {rlp::Item::string(hp_encode(node.path, true)), rlp::Item::string(node.value)});
        case Node::Kind::Extension:
            return rlp::Item::of(
                {rlp::Item::string(hp_encode(node.path, false)), ref_to_item(node.child)});
        case Node::Kind::Branch: {
            std::vector<rlp::Item> items;
            items.reserve(17);
            for (const Ref& c : node.children) items.push_back(ref_to_item(c));
            items.push_back(rlp::Item::string(node.value));
            return rlp::Item::of(std::move(items));
        }
    }
    throw MptError("bad node kind");
}

NodePtr item_to_node(const rlp::Item& item);

Ref item_to_ref(const rlp::Item& item) {
    if (item.is_string()) {
        if (item.str.empty()) return Ref::none();
        if (item.str.size() != 32) throw MptError("bad child reference");
        Ref r;
        r.by_hash = true;
        r.hash = hash32_from_bytes(item.str);
        return r;
    }
    Ref r;
    r.embedded = item_to_node(item);
    return r;
}

NodePtr item_to_node(const rlp::Item& item) {
    if (!item.is_list()) throw MptError("node is not a list");
    auto node = std::make_shared<Node>();
    if (item.list.size() == 2) {
        if (!item.list[0].is_string()) throw MptError("bad path item");
        HpDecoded hp = hp_decode(item.list[0].str);
        node->path = std::move(hp.nibbles);
        if (hp.leaf) {
            node->kind = Node::Kind::Leaf;
            if (!item.list[1].is_string()) throw MptError("bad leaf value");
            node->value = item.list[1].str;
        } else {
            node->kind = Node::Kind::Extension;
            node->child = item_to_ref(item.list[1]);
            if (node->child.is_empty()) throw MptError("extension without child");
        }
        return node;
    }
    if (item.list.size() == 17) {
        node->kind = Node::Kind::Branch;
        for (size_t i = 0; i < 16; ++i) node->children[i] = item_to_ref(item.list[i]);
        if (!item.list[16].is_string()) throw MptError("bad branch value");
        node->value = item.list[16].str;
        return node;
    }
    throw MptError("bad node arity");
}

NodePtr decode_node(BytesView data) {
    auto item = rlp::decode(data);
    if (!item) throw MptError("undecodable node");
    return item_to_node(*item);
}

class Walker {
public:
    Walker(const MptNodeSource& source, MptStore* sink) : source_(source), sink_(sink) {}

    NodePtr resolve(const Ref& ref) const {
        if (ref.embedded) return ref.embedded;
        if (auto it = created_.find(ref.hash); it != created_.end()) return it->second;
        auto bytes = source_.get(ref.hash);
        if (!bytes) throw MptError("missing node");
        return decode_node(*bytes);
    }

    std::optional<Bytes> get(const Ref& root, std::span<const uint8_t> path) const {
        if (root.is_empty()) return std::nullopt;
        NodePtr node = resolve(root);
        switch (node->kind) {
            case Node::Kind::Leaf:
                if (std::equal(node->path.begin(), node->path.end(), path.begin(), path.end()))
                    return node->value;
                return std::nullopt;
            case Node::Kind::Extension: {
                size_t n = node->path.size();
                if (path.size() < n ||
                    !std::equal(node->path.begin(), node->path.end(), path.begin()))
                    return std::nullopt;
                return get(node->child, path.subspan(n));
            }
            case Node::Kind::Branch:
                if (path.empty())
                    return node->value.empty() ? std::nullopt : std::make_optional(node->value);
                if (node->children[path[0]].is_empty()) return std::nullopt;
                return get(node->children[path[0]], path.subspan(1));
        }
        throw MptError("bad node kind");
    }

    Ref insert(const Ref& root, std::span<const uint8_t> path, BytesView value) {
        if (root.is_empty()) return make_ref(leaf(path, value));
        NodePtr node = resolve(root);
        switch (node->kind) {
            case Node::Kind::Leaf: {
                size_t c = common_prefix(node->path, path);
                if (c == node->path.size() && c == path.size())
                    return make_ref(leaf(path, value));  // overwrite
                Node branch;
                branch.kind = Node::Kind::Branch;
                if (c == node->path.size())
                    branch.value = node->value;
                else
                    branch.children[node->path[c]] =
                        make_ref(leaf({node->path.begin() + c + 1, node->path.end()}, node->value));
                if (c == path.size())
                    branch.value.assign(value.begin(), value.end());
                else
                    branch.children[path[c]] = make_ref(leaf(path.subspan(c + 1), value));
                Ref r = make_ref(branch);
                if (c > 0)
                    r = make_ref(extension({node->path.begin(), node->path.begin() + c}, r));
                return r;
            }
            case Node::Kind::Extension: {
                size_t c = common_prefix(node->path, path);
                if (c == node->path.size()) {
                    Node ext = *node;
                    ext.child = insert(node->child, path.subspan(c), value);
                    return make_ref(ext);
                }
                Ref below =
                    c + 1 == node->path.size()
                        ? node->child
                        : make_ref(extension({node->path.begin() + c + 1, node->path.end()},
                                             node->child));
                Node branch;
                branch.kind = Node::Kind::Branch;
                branch.children[node->path[c]] = below;
                if (c == path.size())
                    branch.value.assign(value.begin(), value.end());
                else
                    branch.children[path[c]] = make_ref(leaf(path.subspan(c + 1), value));
                Ref r = make_ref(branch);
                if (c > 0)
                    r = make_ref(extension({node->path.begin(), node->path.begin() + c}, r));
                return r;
            }
            case Node::Kind::Branch: {
                Node branch = *node;
                if (path.empty()) {
                    branch.value.assign(value.begin(), value.end());
                } else {
                    branch.children[path[0]] =
                        insert(branch.children[path[0]], path.subspan(1), value);
                }
                return make_ref(branch);
            }
        }
        throw MptError("bad node kind");
    }

    Ref erase(const Ref& root, std::span<const uint8_t> path) {
        if (root.is_empty()) return root;
        NodePtr node = resolve(root);
        switch (node->kind) {
            case Node::Kind::Leaf:
                if (std::equal(node->path.begin(), node->path.end(), path.begin(), path.end()))
                    return Ref::none();
                return root;
            case Node::Kind::Extension: {
                size_t n = node->path.size();
                if (path.size() < n ||
                    !std::equal(node->path.begin(), node->path.end(), path.begin()))
                    return root;
                Ref child = erase(node->child, path.subspan(n));
                if (child.is_empty()) return Ref::none();
                NodePtr below = resolve(child);
                if (below->kind == Node::Kind::Branch)
                    return make_ref(extension(node->path, child));
                Node merged = *below;
                merged.path.insert(merged.path.begin(), node->path.begin(), node->path.end());
                return make_ref(merged);
            }
            case Node::Kind::Branch: {
                Node branch = *node;
                if (path.empty()) {
                    branch.value.clear();
                } else {
                    branch.children[path[0]] = erase(branch.children[path[0]], path.subspan(1));
                }
                return normalize_branch(branch);
            }
        }
        throw MptError("bad node kind");
    }

    Hash32 store_root(const Ref& ref) {
        if (ref.is_empty()) return EMPTY_TRIE_ROOT;
        if (ref.by_hash) return ref.hash;
        Bytes encoded = rlp::encode(node_to_item(*ref.embedded));
        Hash32 h = keccak256(encoded);
        if (sink_) sink_->put(std::move(encoded));
        return h;
    }

private:
    const MptNodeSource& source_;
    MptStore* sink_;
    mutable std::map<Hash32, NodePtr> created_;

    static Node leaf(std::span<const uint8_t> path, BytesView value) {
        Node n;
        n.kind = Node::Kind::Leaf;
        n.path.assign(path.begin(), path.end());
        n.value.assign(value.begin(), value.end());
        return n;
    }

    static Node extension(Nibbles path, Ref child) {
        Node n;
        n.kind = Node::Kind::Extension;
        n.path = std::move(path);
        n.child = std::move(child);
        return n;
    }

    Ref normalize_branch(const Node& branch) {
        int live = -1;
        int count = 0;
        for (int i = 0; i < 16; ++i) {
            if (!branch.children[i].is_empty()) {
                live = i;
                ++count;
            }
        }
        if (count >= 2 || (count == 1 && !branch.value.empty())) return make_ref(branch);
        if (count == 0 && branch.value.empty()) return Ref::none();
        if (count == 0) return make_ref(leaf({}, branch.value));
        // One child left: fold the branch into it. This resolve is why
        // deletion witnesses carry one extra sibling node.
        NodePtr child = resolve(branch.children[live]);
        if (child->kind == Node::Kind::Branch)
            return make_ref(extension({static_cast<uint8_t>(live)}, branch.children[live]));
        Node merged = *child;
        merged.path.insert(merged.path.begin(), static_cast<uint8_t>(live));
        return make_ref(merged);
    }

    Ref make_ref(const Node& node) {
        Bytes encoded = rlp::encode(node_to_item(node));
        auto ptr = std::make_shared<Node>(node);
        if (encoded.size() < 32) {
            Ref r;
            r.embedded = ptr;
            return r;
        }
        Ref r;
        r.by_hash = true;
        r.hash = keccak256(encoded);
        created_[r.hash] = ptr;
        if (sink_) sink_->put(std::move(encoded));
        return r;
    }
};

Ref root_ref(const Hash32& root) {
    if (root == EMPTY_TRIE_ROOT) return Ref::none();
    Ref r;
    r.by_hash = true;
    r.hash = root;
    return r;
}

class RecordingSource : public MptNodeSource {
public:
    explicit RecordingSource(const MptNodeSource& base) : base_(base) {}

    std::optional<Bytes> get(const Hash32& hash) const override {
        auto bytes = base_.get(hash);
        if (bytes && seen_.insert(hash).second) nodes_.push_back(*bytes);
        return bytes;
    }

    std::vector<Bytes> take() { return std::move(nodes_); }

private:
    const MptNodeSource& base_;
    mutable std::vector<Bytes> nodes_;
    mutable std::set<Hash32> seen_;
};

}  // namespace

std::optional<Bytes> MptStore::get(const Hash32& hash) const {
    auto it = nodes_.find(hash);
    if (it == nodes_.end()) return std::nullopt;
    return it->second;
}

Hash32 MptStore::put(Bytes node_rlp) {
    Hash32 h = keccak256(node_rlp);
    nodes_.emplace(h, std::move(node_rlp));
    return h;
}

MptProofBag::MptProofBag(std::span<const Bytes> nodes) {
    for (const Bytes& n : nodes) nodes_.emplace(keccak256(n), n);
}

std::optional<Bytes> MptProofBag::get(const Hash32& hash) const {
    auto it = nodes_.find(hash);
    if (it == nodes_.end()) return std::nullopt;
    return it->second;
}

std::optional<Bytes> mpt_get(const MptNodeSource& source, const Hash32& root, BytesView key) {
    Walker walker(source, nullptr);
    return walker.get(root_ref(root), to_nibbles(key));
}

Hash32 mpt_update(const MptNodeSource& source, MptStore& sink, const Hash32& root, BytesView key,
                  std::optional<BytesView> value) {
    Walker walker(source, &sink);
    Nibbles path = to_nibbles(key);
    Ref r = (value && !value->empty()) ? walker.insert(root_ref(root), path, *value)
                                       : walker.erase(root_ref(root), path);
    return walker.store_root(r);
}

MptProof mpt_prove(const MptNodeSource& source, const Hash32& root, BytesView key) {
    RecordingSource rec(source);
    Walker walker(rec, nullptr);
    walker.get(root_ref(root), to_nibbles(key));
    return MptProof{rec.take()};
}

MptProof mpt_prove_for_write(const MptNodeSource& source, const Hash32& root, BytesView key,
                             std::optional<BytesView> value) {
    RecordingSource rec(source);
    {
        // The full read path first; the write may short-circuit on absence.
        Walker reader(rec, nullptr);
        reader.get(root_ref(root), to_nibbles(key));
    }
    MptStore scratch;
    mpt_update(rec, scratch, root, key, value);
    return MptProof{rec.take()};
}

std::optional<std::optional<Bytes>> mpt_verify_read(const Hash32& root, BytesView key,
                                                    const MptProof& proof) {
    try {
        MptProofBag bag(proof.nodes);
        Walker walker(bag, nullptr);
        return walker.get(root_ref(root), to_nibbles(key));
    } catch (const MptError&) {
        return std::nullopt;
    }
}

std::optional<Hash32> mpt_apply_write(const Hash32& root, BytesView key,
                                      std::optional<BytesView> value, const MptProof& proof) {
    try {
        MptProofBag bag(proof.nodes);
        MptStore scratch;
        return mpt_update(bag, scratch, root, key, value);
    } catch (const MptError&) {
        return std::nullopt;
    }
}

}  // namespace fpvm

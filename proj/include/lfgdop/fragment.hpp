#ifndef LFGDOP_FRAGMENT_HPP
#define LFGDOP_FRAGMENT_HPP

// Decomposition: Root and Frontier carve connected subtrees with their
// phi-corresponding f-structure, Discard generalizes them by deleting
// attribute-value pairs.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lfgdop/canonical.hpp"
#include "lfgdop/representation.hpp"

namespace lfgdop {

enum class Provenance { RootFrontier, Discard };

struct Fragment : Representation {
    Provenance provenance = Provenance::RootFrontier;

    Fragment() = default;
    Fragment(Representation r, Provenance p) : Representation(std::move(r)), provenance(p) {}

    int depth() const { return cstruct.depth(); }
    std::string root_category() const { return cstruct.at(cstruct.root).label; }
};

// ---------------------------------------------------------------------
// Indexed trees (the compact notation: every node carries the id of its
// phi-corresponding unit).

struct IndexedTree {
    CTree tree;
    std::map<NodeId, UnitId> index;
    std::map<UnitId, FUnit> units;
};

// Terminals without a phi link inherit their parent's index, making the
// correspondence total.
inline IndexedTree index_tree(const Representation& repr) {
    IndexedTree out;
    out.tree = repr.cstruct;
    for (const auto& [id, unit] : repr.fstruct.units) out.units[id] = unit;

    struct Walker {
        const Representation& r;
        IndexedTree& it;
        void walk(NodeId n, UnitId inherited) {
            UnitId u = r.phi_of(n);
            if (u < 0) {
                if (r.cstruct.at(n).kind != NodeKind::Terminal || inherited < 0)
                    throw Error(ErrorKind::Data,
                                "node " + std::to_string(n) + " has no phi image");
                u = inherited;
            }
            if (!r.fstruct.has(u))
                throw Error(ErrorKind::Data, "dangling phi target " + std::to_string(u));
            it.index[n] = u;
            for (NodeId c : r.cstruct.at(n).children) walk(c, u);
        }
    } w{repr, out};
    w.walk(repr.cstruct.root, -1);
    return out;
}

inline Representation from_indexed(const IndexedTree& it) {
    Representation repr;
    repr.cstruct = it.tree;
    for (const auto& [id, unit] : it.units) repr.fstruct.units[id] = unit;
    for (const auto& [n, u] : it.index) repr.phi[n] = u;
    repr.fstruct.outer = it.index.at(it.tree.root);
    return repr;
}

// ---------------------------------------------------------------------
// Root and Frontier.

namespace detail {

inline void erase_semforms(FUnit& u) {
    auto& ps = u.pairs;
    ps.erase(std::remove_if(ps.begin(), ps.end(),
                            [](const auto& p) { return is_semform(p.second); }),
             ps.end());
}

// Restrict the store to units phi-accessible from the remaining nodes.
inline void restrict_units(Representation& r) {
    std::set<NodeId> remaining;
    for (const auto& [id, n] : r.cstruct.nodes) remaining.insert(id);
    std::set<UnitId> keep = accessible_units(r, remaining);
    for (auto it = r.fstruct.units.begin(); it != r.fstruct.units.end();)
        it = keep.count(it->first) ? std::next(it) : r.fstruct.units.erase(it);
    if (!r.fstruct.units.count(r.fstruct.outer))
        r.fstruct.outer = r.phi_of(r.cstruct.root);
}

} // namespace detail

// Root keeps the subtree under `node`; units no longer phi-accessible
// are erased, and semantic forms local to units that correspond only to
// erased nodes are deleted (the word that introduced them is gone).
inline Fragment root_op(const Representation& repr, NodeId node) {
    const CNode& sel = repr.cstruct.at(node);
    if (sel.kind != NodeKind::Internal)
        throw Error(ErrorKind::Data, "root_op: must select an internal node");

    std::set<NodeId> remaining = repr.cstruct.subtree(node);
    Fragment frag;
    frag.provenance = Provenance::RootFrontier;
    frag.cstruct.root = node;
    for (NodeId n : remaining) frag.cstruct.nodes[n] = repr.cstruct.at(n);
    for (NodeId n : remaining) {
        UnitId u = repr.phi_of(n);
        if (u >= 0) frag.phi[n] = u;
    }

    std::set<UnitId> keep = accessible_units(repr, remaining);
    std::set<UnitId> kept_images;   // phi images of remaining nodes
    for (NodeId n : remaining) {
        UnitId u = repr.phi_of(n);
        if (u >= 0) kept_images.insert(u);
    }
    std::set<UnitId> erased_images;
    for (const auto& [id, n] : repr.cstruct.nodes) {
        if (remaining.count(id)) continue;
        UnitId u = repr.phi_of(id);
        if (u >= 0) erased_images.insert(u);
    }

    for (UnitId u : keep) {
        FUnit unit = repr.fstruct.at(u);
        if (erased_images.count(u) && !kept_images.count(u)) detail::erase_semforms(unit);
        frag.fstruct.units[u] = std::move(unit);
    }
    frag.fstruct.outer = frag.phi_of(node);
    return frag;
}

// Frontier turns the chosen nodes into open slots, erasing everything
// they dominate. The slot keeps its phi link; semantic forms
// corresponding to any erased node are deleted.
inline Fragment frontier_op(const Fragment& frag, const std::set<NodeId>& nodes) {
    for (NodeId n : nodes) {
        if (n == frag.cstruct.root)
            throw Error(ErrorKind::Data, "frontier_op: root cannot be a frontier node");
        if (frag.cstruct.at(n).kind != NodeKind::Internal)
            throw Error(ErrorKind::Data, "frontier_op: frontier nodes must be internal");
    }
    if (nodes.empty()) return frag;

    std::set<NodeId> deleted;
    for (NodeId n : nodes) {
        auto sub = frag.cstruct.subtree(n);
        sub.erase(n);
        deleted.insert(sub.begin(), sub.end());
    }

    std::set<UnitId> deleted_images;
    for (NodeId d : deleted) {
        UnitId u = frag.phi_of(d);
        if (u >= 0) deleted_images.insert(u);
    }

    Fragment out;
    out.provenance = frag.provenance;
    out.cstruct.root = frag.cstruct.root;
    for (const auto& [id, node] : frag.cstruct.nodes) {
        if (deleted.count(id)) continue;
        CNode copy = node;
        if (nodes.count(id) && !deleted.count(id)) {
            copy.kind = NodeKind::FrontierSlot;
            copy.children.clear();
        }
        out.cstruct.nodes[id] = std::move(copy);
    }
    for (const auto& [n, u] : frag.phi)
        if (!deleted.count(n)) out.phi[n] = u;

    out.fstruct = frag.fstruct;
    for (UnitId u : deleted_images)
        if (out.fstruct.has(u)) detail::erase_semforms(out.fstruct.at(u));
    out.fstruct.outer = frag.fstruct.outer;
    detail::restrict_units(out);
    return out;
}

// ---------------------------------------------------------------------
// Discard.

using DiscardPair = std::pair<UnitId, std::string>;

// Deletable attribute-value pairs: everything except pairs whose value
// phi-corresponds to a remaining node, and PRED pairs under protect_pred.
// Ordered by (canonical unit number, attribute) so subset enumeration is
// deterministic.
inline std::vector<DiscardPair> discard_candidates(const Fragment& frag,
                                                   bool protect_pred = false) {
    std::set<UnitId> node_images;
    for (const auto& [n, u] : frag.phi) node_images.insert(u);

    detail::CanonicalNumbering num;
    for (NodeId n : frag.cstruct.preorder()) num.visit(frag.fstruct, frag.phi_of(n));
    for (const auto& [id, u] : frag.fstruct.units) num.visit(frag.fstruct, id);

    std::vector<DiscardPair> out;
    for (const auto& [id, unit] : frag.fstruct.units) {
        for (const auto& [attr, val] : unit.pairs) {
            if (is_unitref(val) && node_images.count(std::get<UnitRef>(val).target)) continue;
            if (protect_pred && is_semform(val)) continue;
            out.emplace_back(id, attr);
        }
    }
    std::sort(out.begin(), out.end(), [&](const DiscardPair& a, const DiscardPair& b) {
        int na = num.unit_no.at(a.first), nb = num.unit_no.at(b.first);
        if (na != nb) return na < nb;
        return a.second < b.second;
    });
    return out;
}

inline Fragment discard_op(const Fragment& frag, const std::vector<DiscardPair>& pairs,
                           bool protect_pred = false) {
    if (pairs.empty())
        throw Error(ErrorKind::Data, "discard_op: empty pair set");
    auto cands = discard_candidates(frag, protect_pred);
    for (const auto& p : pairs)
        if (std::find(cands.begin(), cands.end(), p) == cands.end())
            throw Error(ErrorKind::Data, "discard_op: pair (" + std::to_string(p.first) + ", " +
                                             p.second + ") is not deletable");

    Fragment out = frag;
    out.provenance = Provenance::Discard;
    for (const auto& [uid, attr] : pairs) out.fstruct.at(uid).erase(attr);
    detail::restrict_units(out);
    return out;
}

// ---------------------------------------------------------------------
// Full enumeration.

// Occurrence counts per canonical form, kept separately per provenance:
// the same structure can be a seen Root/Frontier event and a Discard
// generalization of something else, and the two bags never mix.
struct CountedFragment {
    Fragment fragment;
    long rf = 0;
    long discard = 0;
};

struct FragmentMultiset {
    std::map<std::string, CountedFragment> items;

    void add(const Fragment& f, long count = 1) {
        std::string key = canonical_form(f);
        auto it = items.find(key);
        if (it == items.end()) it = items.emplace(key, CountedFragment{f, 0, 0}).first;
        (f.provenance == Provenance::RootFrontier ? it->second.rf : it->second.discard) += count;
    }
    void merge(const FragmentMultiset& other) {
        for (const auto& [key, item] : other.items) {
            auto it = items.find(key);
            if (it == items.end()) {
                items.emplace(key, item);
            } else {
                it->second.rf += item.rf;
                it->second.discard += item.discard;
            }
        }
    }
    long total() const {
        long t = 0;
        for (const auto& [k, v] : items) t += v.rf + v.discard;
        return t;
    }
};

struct EnumerateOptions {
    int max_depth = 4;
    bool include_discard = false;
    bool protect_pred = false;
    long discard_cap = -1;   // per source fragment; <0 means unlimited
};

namespace detail {

// All frontier choices below `n`: sets of pairwise non-dominating
// internal nodes (cutting a node makes choices below it moot).
inline std::vector<std::set<NodeId>> frontier_choices(const CTree& t, NodeId n) {
    std::vector<std::set<NodeId>> acc{{}};
    for (NodeId c : t.at(n).children) {
        const CNode& child = t.at(c);
        std::vector<std::set<NodeId>> options;
        if (child.kind == NodeKind::Internal) {
            options.push_back({c});
            for (auto& s : frontier_choices(t, c)) options.push_back(std::move(s));
        } else {
            options.push_back({});
        }
        std::vector<std::set<NodeId>> next;
        next.reserve(acc.size() * options.size());
        for (const auto& a : acc)
            for (const auto& o : options) {
                std::set<NodeId> merged = a;
                merged.insert(o.begin(), o.end());
                next.push_back(std::move(merged));
            }
        acc = std::move(next);
    }
    return acc;
}

// Non-empty subsets of candidate indices in size-lexicographic order,
// streamed to the sink until it declines.
template <typename Sink>
inline void for_each_subset_size_lex(size_t n, Sink&& sink) {
    std::vector<size_t> idx;
    for (size_t size = 1; size <= n; ++size) {
        idx.resize(size);
        for (size_t i = 0; i < size; ++i) idx[i] = i;
        while (true) {
            if (!sink(idx)) return;
            long i = static_cast<long>(size) - 1;
            while (i >= 0 && idx[i] == static_cast<size_t>(i) + n - size) --i;
            if (i < 0) break;
            ++idx[i];
            for (size_t j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
}

} // namespace detail

inline FragmentMultiset enumerate_fragments(const Representation& repr,
                                            const EnumerateOptions& opts = {}) {
    FragmentMultiset out;
    for (const auto& [id, node] : repr.cstruct.nodes) {
        if (node.kind != NodeKind::Internal) continue;
        Fragment rooted = root_op(repr, id);
        for (const auto& frontier : detail::frontier_choices(rooted.cstruct, id)) {
            Fragment f = frontier.empty() ? rooted : frontier_op(rooted, frontier);
            if (f.depth() > opts.max_depth) continue;
            out.add(f);
            if (!opts.include_discard) continue;
            auto cands = discard_candidates(f, opts.protect_pred);
            long emitted = 0;
            detail::for_each_subset_size_lex(cands.size(), [&](const std::vector<size_t>& idx) {
                if (opts.discard_cap >= 0 && emitted >= opts.discard_cap) return false;
                std::vector<DiscardPair> sel;
                sel.reserve(idx.size());
                for (size_t i : idx) sel.push_back(cands[i]);
                out.add(discard_op(f, sel, opts.protect_pred));
                ++emitted;
                return true;
            });
        }
    }
    return out;
}

} // namespace lfgdop

#endif

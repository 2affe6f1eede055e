#ifndef LFGDOP_REPRESENTATION_HPP
#define LFGDOP_REPRESENTATION_HPP

// A representation is a c-structure, an f-structure and the phi
// correspondence between them. Fragments reuse the same triple and add
// provenance; corpus exemplars and final analyses carry no open slots.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lfgdop/cstruct.hpp"
#include "lfgdop/fstruct.hpp"

namespace lfgdop {

using PhiMap = std::map<NodeId, UnitId>;

struct Representation {
    CTree cstruct;
    FStore fstruct;
    PhiMap phi;

    UnitId phi_of(NodeId n) const {
        auto it = phi.find(n);
        return it == phi.end() ? -1 : it->second;
    }
    bool closed() const {
        for (const auto& [id, node] : cstruct.nodes)
            if (node.kind == NodeKind::FrontierSlot) return false;
        return true;
    }
};

// f is phi-accessible from n iff f = phi(n) or an attribute chain leads
// from phi(n) to f.
inline bool phi_accessible(UnitId unit, NodeId node, const Representation& repr) {
    if (!repr.cstruct.has(node))
        throw Error(ErrorKind::Data, "phi_accessible: unknown node " + std::to_string(node));
    if (!repr.fstruct.has(unit))
        throw Error(ErrorKind::Data, "phi_accessible: unknown unit " + std::to_string(unit));
    UnitId start = repr.phi_of(node);
    if (start < 0) return false;
    std::set<UnitId> reach = repr.fstruct.reachable(start);
    return reach.count(unit) != 0;
}

// Units phi-accessible from any node of the given set.
inline std::set<UnitId> accessible_units(const Representation& repr,
                                         const std::set<NodeId>& nodes) {
    std::set<UnitId> out;
    for (NodeId n : nodes) {
        UnitId u = repr.phi_of(n);
        if (u < 0) continue;
        auto reach = repr.fstruct.reachable(u);
        out.insert(reach.begin(), reach.end());
    }
    return out;
}

struct ValidityOptions {
    GovernableFunctions governable = GovernableFunctions::defaults();
    bool strict_completeness = false;
};

// The four well-formedness conditions of a valid representation.
inline Verdict check_valid(const Representation& repr, const ValidityOptions& opts = {}) {
    if (Verdict v = check_nonbranching_dominance(repr.cstruct); !v) return v;
    if (Verdict v = check_uniqueness(repr.fstruct); !v) return v;
    if (Verdict v = check_coherence(repr.fstruct, opts.governable); !v) return v;
    if (Verdict v = check_completeness(repr.fstruct, opts.governable, opts.strict_completeness); !v)
        return v;
    return Verdict::pass();
}

// Structural sanity of the triple itself: phi targets resolve, children
// arity matches node kinds, node ids form a tree.
inline void check_structure(const Representation& repr) {
    std::set<NodeId> seen;
    long edges = 0;
    for (const auto& [id, node] : repr.cstruct.nodes) {
        if (node.id != id) throw Error(ErrorKind::Internal, "node id mismatch");
        edges += static_cast<long>(node.children.size());
        for (NodeId c : node.children) {
            if (!repr.cstruct.has(c)) throw Error(ErrorKind::Data, "dangling child node");
            if (!seen.insert(c).second) throw Error(ErrorKind::Data, "node shared by two parents");
        }
        switch (node.kind) {
        case NodeKind::Terminal:
        case NodeKind::FrontierSlot:
            if (!node.children.empty()) throw Error(ErrorKind::Data, "leaf node with children");
            break;
        case NodeKind::Internal:
            if (node.children.empty()) throw Error(ErrorKind::Data, "internal node without children");
            break;
        }
    }
    if (!repr.cstruct.has(repr.cstruct.root) || seen.count(repr.cstruct.root))
        throw Error(ErrorKind::Data, "bad root node");
    if (edges + 1 != static_cast<long>(repr.cstruct.nodes.size()))
        throw Error(ErrorKind::Data, "c-structure is not a tree");
    for (const auto& [n, u] : repr.phi) {
        if (!repr.cstruct.has(n)) throw Error(ErrorKind::Data, "phi link from unknown node");
        if (!repr.fstruct.has(u))
            throw Error(ErrorKind::Data, "dangling phi target " + std::to_string(u));
    }
    for (const auto& [id, unit] : repr.fstruct.units)
        for (const auto& [a, v] : unit.pairs)
            if (is_unitref(v) && !repr.fstruct.has(std::get<UnitRef>(v).target))
                throw Error(ErrorKind::Data, "dangling unit ref in unit " + std::to_string(id));
}

} // namespace lfgdop

#endif

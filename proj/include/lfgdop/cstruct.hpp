#ifndef LFGDOP_CSTRUCT_HPP
#define LFGDOP_CSTRUCT_HPP

// Constituent structure: ordered trees whose leaves are terminal words
// or open frontier slots awaiting substitution.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lfgdop/fstruct.hpp"

namespace lfgdop {

using NodeId = int;

enum class NodeKind { Internal, Terminal, FrontierSlot };

struct CNode {
    NodeId id = -1;
    std::string label;               // category, or word form for terminals
    std::vector<NodeId> children;
    NodeKind kind = NodeKind::Internal;
};

struct CTree {
    NodeId root = -1;
    std::map<NodeId, CNode> nodes;

    const CNode& at(NodeId id) const {
        auto it = nodes.find(id);
        if (it == nodes.end())
            throw Error(ErrorKind::Data, "unknown c-structure node " + std::to_string(id));
        return it->second;
    }
    CNode& at(NodeId id) {
        auto it = nodes.find(id);
        if (it == nodes.end())
            throw Error(ErrorKind::Data, "unknown c-structure node " + std::to_string(id));
        return it->second;
    }
    bool has(NodeId id) const { return nodes.count(id) != 0; }

    // Leftmost depth-first preorder.
    std::vector<NodeId> preorder() const {
        std::vector<NodeId> out;
        preorder_from(root, out);
        return out;
    }
    void preorder_from(NodeId n, std::vector<NodeId>& out) const {
        out.push_back(n);
        for (NodeId c : at(n).children) preorder_from(c, out);
    }

    std::set<NodeId> subtree(NodeId n) const {
        std::vector<NodeId> order;
        preorder_from(n, order);
        return {order.begin(), order.end()};
    }

    // Terminal words and frontier-slot categories, left to right.
    std::vector<NodeId> leaves() const {
        std::vector<NodeId> out;
        for (NodeId n : preorder()) {
            NodeKind k = at(n).kind;
            if (k == NodeKind::Terminal || k == NodeKind::FrontierSlot) out.push_back(n);
        }
        return out;
    }

    std::vector<std::string> terminal_yield() const {
        std::vector<std::string> out;
        for (NodeId n : leaves())
            if (at(n).kind == NodeKind::Terminal) out.push_back(at(n).label);
        return out;
    }

    // Longest root-to-leaf edge count.
    int depth() const { return depth_from(root); }
    int depth_from(NodeId n) const {
        int best = 0;
        for (NodeId c : at(n).children) {
            int d = 1 + depth_from(c);
            if (d > best) best = d;
        }
        return best;
    }

    NodeId parent_of(NodeId target) const {
        for (const auto& [id, node] : nodes)
            for (NodeId c : node.children)
                if (c == target) return id;
        return -1;
    }
};

// No maximal nonbranching chain may contain the same category twice.
inline Verdict check_nonbranching_dominance(const CTree& cs) {
    struct Walker {
        const CTree& t;
        Verdict bad = Verdict::pass();
        void walk(NodeId n, std::vector<std::string> chain) {
            const CNode& node = t.at(n);
            if (node.kind == NodeKind::Terminal) return;
            for (const std::string& c : chain)
                if (c == node.label) {
                    if (bad.ok) bad = Verdict::fail("NonbranchingDominance", -1, node.label);
                    return;
                }
            chain.push_back(node.label);
            if (node.children.size() == 1) {
                walk(node.children[0], std::move(chain));
            } else {
                for (NodeId c : node.children) walk(c, {});
            }
        }
    } w{cs};
    w.walk(cs.root, {});
    return w.bad;
}

} // namespace lfgdop

#endif

#ifndef LFGDOP_CANONICAL_HPP
#define LFGDOP_CANONICAL_HPP

// Canonical serialization: a deterministic single-line form invariant
// under unit-id and semform-instance renaming. Two fragments are the
// same counting event iff their canonical forms are byte-equal.
//
// Layout:  (S.1 NP*.2 (VP.1 eats.1)) 1->[(PRED 'eat<SUBJ>'#1)(SUBJ 2)(TENSE PRES)] 2->[(NUM SG)]
// Units are numbered by first visit of a leftmost depth-first
// c-structure walk followed by attribute-sorted f-structure descent;
// unit refs are bare canonical numbers; frontier slots carry a star.

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "lfgdop/representation.hpp"

namespace lfgdop {

namespace detail {

struct CanonicalNumbering {
    std::map<UnitId, int> unit_no;
    std::vector<UnitId> order;

    void visit(const FStore& fs, UnitId u) {
        if (u < 0 || unit_no.count(u)) return;
        unit_no[u] = static_cast<int>(order.size()) + 1;
        order.push_back(u);
        if (!fs.has(u)) return;
        auto pairs = fs.at(u).pairs;
        std::sort(pairs.begin(), pairs.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [attr, val] : pairs)
            if (is_unitref(val)) visit(fs, std::get<UnitRef>(val).target);
    }
};

inline void append_units(std::string& out, const FStore& fs, CanonicalNumbering& num) {
    // Stray units not reached from any start point keep a stable order too.
    std::vector<UnitId> stray;
    for (const auto& [id, u] : fs.units)
        if (!num.unit_no.count(id)) stray.push_back(id);
    for (UnitId id : stray) num.visit(fs, id);

    std::map<long, int> instance_no;
    for (size_t i = 0; i < num.order.size(); ++i) {
        UnitId id = num.order[i];
        out += ' ';
        out += std::to_string(i + 1);
        out += "->[";
        if (fs.has(id)) {
            auto pairs = fs.at(id).pairs;
            std::sort(pairs.begin(), pairs.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            for (const auto& [attr, val] : pairs) {
                out += '(';
                out += attr;
                out += ' ';
                if (is_atom(val)) {
                    out += std::get<Atom>(val).symbol;
                } else if (is_unitref(val)) {
                    out += std::to_string(num.unit_no.at(std::get<UnitRef>(val).target));
                } else {
                    const SemForm& sf = std::get<SemForm>(val);
                    out += '\'';
                    out += sf.predicate;
                    if (!sf.governed.empty()) {
                        out += '<';
                        for (size_t k = 0; k < sf.governed.size(); ++k) {
                            if (k) out += ',';
                            out += sf.governed[k];
                        }
                        out += '>';
                    }
                    out += '\'';
                    auto [it, fresh] = instance_no.emplace(sf.instance,
                                                           static_cast<int>(instance_no.size()) + 1);
                    out += '#';
                    out += std::to_string(it->second);
                }
                out += ')';
            }
        }
        out += ']';
    }
}

} // namespace detail

// Tree shape alone (categories, words, slot markers), no phi indices.
inline std::string tree_canonical(const CTree& cs, NodeId n) {
    const CNode& node = cs.at(n);
    if (node.kind == NodeKind::Terminal) return node.label;
    if (node.kind == NodeKind::FrontierSlot) return node.label + "*";
    std::string out = "(" + node.label;
    for (NodeId c : node.children) {
        out += ' ';
        out += tree_canonical(cs, c);
    }
    out += ')';
    return out;
}
inline std::string tree_canonical(const CTree& cs) { return tree_canonical(cs, cs.root); }

inline std::string canonical_form(const Representation& repr) {
    detail::CanonicalNumbering num;
    for (NodeId n : repr.cstruct.preorder()) num.visit(repr.fstruct, repr.phi_of(n));

    struct Render {
        const Representation& r;
        const detail::CanonicalNumbering& num;
        std::string go(NodeId n) const {
            const CNode& node = r.cstruct.at(n);
            UnitId u = r.phi_of(n);
            std::string idx = "." + std::to_string(u < 0 ? 0 : num.unit_no.at(u));
            if (node.kind == NodeKind::Terminal) return node.label + idx;
            if (node.kind == NodeKind::FrontierSlot) return node.label + "*" + idx;
            std::string out = "(" + node.label + idx;
            for (NodeId c : node.children) {
                out += ' ';
                out += go(c);
            }
            out += ')';
            return out;
        }
    } render{repr, num};

    std::string out = render.go(repr.cstruct.root);
    detail::append_units(out, repr.fstruct, num);
    return out;
}

// Signature of the unit subgraph reachable from the given start units,
// in start order. Same normalization as canonical_form.
inline std::string store_signature(const FStore& fs, const std::vector<UnitId>& starts) {
    detail::CanonicalNumbering num;
    for (UnitId u : starts) num.visit(fs, u);
    std::string out;
    std::map<long, int> instance_no;
    for (size_t i = 0; i < num.order.size(); ++i) {
        UnitId id = num.order[i];
        out += std::to_string(i + 1);
        out += "[";
        auto pairs = fs.at(id).pairs;
        std::sort(pairs.begin(), pairs.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [attr, val] : pairs) {
            out += '(';
            out += attr;
            out += ' ';
            if (is_atom(val)) out += std::get<Atom>(val).symbol;
            else if (is_unitref(val)) out += std::to_string(num.unit_no.at(std::get<UnitRef>(val).target));
            else {
                const SemForm& sf = std::get<SemForm>(val);
                out += sf.predicate;
                for (const auto& g : sf.governed) { out += ','; out += g; }
                auto [it, fresh] = instance_no.emplace(sf.instance,
                                                       static_cast<int>(instance_no.size()) + 1);
                out += '#';
                out += std::to_string(it->second);
            }
            out += ')';
        }
        out += ']';
    }
    return out;
}

// ---------------------------------------------------------------------
// Parsing the canonical line back into a representation. Semform
// instances are minted from the counter, preserving within-line identity.

namespace detail {

struct CanonicalParser {
    const std::string& text;
    size_t pos = 0;
    long* instance_counter;
    std::map<int, long> instance_of;    // #k -> minted instance

    Representation repr;
    NodeId next_node = 0;
    std::map<int, UnitId> unit_of;      // canonical number -> unit id

    explicit CanonicalParser(const std::string& t, long* counter)
        : text(t), instance_counter(counter) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorKind::Data, "canonical parse: " + msg + " at offset " + std::to_string(pos));
    }
    void skip_ws() { while (pos < text.size() && text[pos] == ' ') ++pos; }
    bool eat(char c) {
        if (pos < text.size() && text[pos] == c) { ++pos; return true; }
        return false;
    }
    void expect(char c) { if (!eat(c)) fail(std::string("expected '") + c + "'"); }

    static bool sym_char(char c) {
        return !std::isspace(static_cast<unsigned char>(c)) &&
               c != '(' && c != ')' && c != '[' && c != ']' && c != '.' &&
               c != '\'' && c != '<' && c != '>' && c != ',' && c != '#';
    }
    std::string symbol() {
        size_t start = pos;
        while (pos < text.size() && sym_char(text[pos])) ++pos;
        if (pos == start) fail("expected symbol");
        return text.substr(start, pos - start);
    }
    int number() {
        size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) fail("expected number");
        return std::stoi(text.substr(start, pos - start));
    }
    static bool all_digits(const std::string& s) {
        if (s.empty()) return false;
        for (char c : s)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        return true;
    }

    UnitId unit_for(int canon_no) {
        auto [it, fresh] = unit_of.emplace(canon_no, static_cast<UnitId>(unit_of.size()) + 1);
        if (fresh) {
            FUnit u;
            u.id = it->second;
            repr.fstruct.units[it->second] = u;
        }
        return it->second;
    }

    // label[*].idx or (label.idx children...)
    NodeId node() {
        skip_ws();
        if (eat('(')) {
            std::string label = symbol();
            bool slot = !label.empty() && label.back() == '*';
            if (slot) fail("internal node cannot be a slot");
            expect('.');
            int idx = number();
            NodeId id = next_node++;
            CNode n;
            n.id = id;
            n.label = label;
            n.kind = NodeKind::Internal;
            skip_ws();
            while (!eat(')')) {
                n.children.push_back(node());
                skip_ws();
            }
            if (n.children.empty()) fail("internal node without children");
            repr.cstruct.nodes[id] = n;
            if (idx > 0) repr.phi[id] = unit_for(idx);
            return id;
        }
        std::string label = symbol();
        bool slot = !label.empty() && label.back() == '*';
        if (slot) label.pop_back();
        expect('.');
        int idx = number();
        NodeId id = next_node++;
        CNode n;
        n.id = id;
        n.label = label;
        n.kind = slot ? NodeKind::FrontierSlot : NodeKind::Terminal;
        repr.cstruct.nodes[id] = n;
        if (idx > 0) repr.phi[id] = unit_for(idx);
        return id;
    }

    FValue value() {
        if (eat('\'')) {
            SemForm sf;
            size_t start = pos;
            while (pos < text.size() && text[pos] != '<' && text[pos] != '\'') ++pos;
            sf.predicate = text.substr(start, pos - start);
            if (sf.predicate.empty()) fail("empty predicate");
            if (eat('<')) {
                sf.governed.push_back(symbol());
                while (eat(',')) sf.governed.push_back(symbol());
                expect('>');
            }
            expect('\'');
            if (eat('#')) {
                int k = number();
                auto [it, fresh] = instance_of.emplace(k, 0);
                if (fresh) it->second = ++*instance_counter;
                sf.instance = it->second;
            } else {
                sf.instance = ++*instance_counter;
            }
            return sf;
        }
        std::string tok = symbol();
        if (all_digits(tok)) return UnitRef{unit_for(std::stoi(tok))};
        return Atom{tok};
    }

    void unit_block() {
        int canon_no = number();
        expect('-');
        expect('>');
        expect('[');
        UnitId id = unit_for(canon_no);
        FUnit& u = repr.fstruct.at(id);
        while (eat('(')) {
            std::string attr = symbol();
            skip_ws();
            FValue v = value();
            expect(')');
            if (u.has(attr)) throw Error(ErrorKind::Data, "duplicate attribute " + attr +
                                         " in unit " + std::to_string(canon_no));
            u.set(attr, std::move(v));
        }
        expect(']');
    }

    Representation parse() {
        repr.cstruct.root = node();
        skip_ws();
        while (pos < text.size()) {
            unit_block();
            skip_ws();
        }
        UnitId outer = repr.phi_of(repr.cstruct.root);
        repr.fstruct.outer = outer;
        return repr;
    }
};

} // namespace detail

inline Representation parse_canonical(const std::string& line, long* instance_counter) {
    detail::CanonicalParser p(line, instance_counter);
    return p.parse();
}

} // namespace lfgdop

#endif

#ifndef LFGDOP_FSTRUCT_HPP
#define LFGDOP_FSTRUCT_HPP

// Attribute-value structures: units, atomic/semform/reference values,
// recursive unification and the Uniqueness/Coherence/Completeness checks.

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lfgdop {

using UnitId = int;

enum class ErrorKind { Usage, Data, NoParse, Internal };

struct Error : std::runtime_error {
    ErrorKind kind;
    explicit Error(ErrorKind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

struct Atom {
    std::string symbol;
    friend bool operator==(const Atom&, const Atom&) = default;
};

// A semantic form is instance-unique: two textual occurrences of
// eat<SUBJ> in a corpus are distinct instances and never unify.
struct SemForm {
    long instance = 0;
    std::string predicate;
    std::vector<std::string> governed;   // ordered governable-function list
    friend bool operator==(const SemForm&, const SemForm&) = default;
};

struct UnitRef {
    UnitId target = -1;
    friend bool operator==(const UnitRef&, const UnitRef&) = default;
};

using FValue = std::variant<Atom, SemForm, UnitRef>;

inline bool is_atom(const FValue& v)    { return std::holds_alternative<Atom>(v); }
inline bool is_semform(const FValue& v) { return std::holds_alternative<SemForm>(v); }
inline bool is_unitref(const FValue& v) { return std::holds_alternative<UnitRef>(v); }

struct FUnit {
    UnitId id = -1;
    std::vector<std::pair<std::string, FValue>> pairs;

    const FValue* find(const std::string& attr) const {
        for (const auto& [a, v] : pairs)
            if (a == attr) return &v;
        return nullptr;
    }
    bool has(const std::string& attr) const { return find(attr) != nullptr; }
    void set(const std::string& attr, FValue v) { pairs.emplace_back(attr, std::move(v)); }
    bool erase(const std::string& attr) {
        for (auto it = pairs.begin(); it != pairs.end(); ++it)
            if (it->first == attr) { pairs.erase(it); return true; }
        return false;
    }
    const SemForm* pred() const {
        const FValue* v = find("PRED");
        return v && is_semform(*v) ? &std::get<SemForm>(*v) : nullptr;
    }
};

// Flat unit store; re-entrancy is plain aliasing of unit ids.
struct FStore {
    std::map<UnitId, FUnit> units;
    UnitId outer = -1;

    const FUnit& at(UnitId id) const {
        auto it = units.find(id);
        if (it == units.end())
            throw Error(ErrorKind::Data, "unknown f-structure unit " + std::to_string(id));
        return it->second;
    }
    FUnit& at(UnitId id) {
        auto it = units.find(id);
        if (it == units.end())
            throw Error(ErrorKind::Data, "unknown f-structure unit " + std::to_string(id));
        return it->second;
    }
    bool has(UnitId id) const { return units.count(id) != 0; }

    // Units reachable from `start` through attribute chains (start included).
    std::set<UnitId> reachable(UnitId start) const {
        std::set<UnitId> seen;
        std::deque<UnitId> work{start};
        while (!work.empty()) {
            UnitId u = work.front();
            work.pop_front();
            if (!seen.insert(u).second) continue;
            auto it = units.find(u);
            if (it == units.end()) continue;
            for (const auto& [a, v] : it->second.pairs)
                if (is_unitref(v)) work.push_back(std::get<UnitRef>(v).target);
        }
        return seen;
    }
};

struct GovernableFunctions {
    std::set<std::string> functions;
    static GovernableFunctions defaults() {
        return {{"SUBJ", "OBJ", "OBJ2", "OBL", "COMP", "XCOMP"}};
    }
    bool contains(const std::string& attr) const { return functions.count(attr) != 0; }
};

struct Verdict {
    bool ok = true;
    std::string condition;   // which condition failed
    UnitId unit = -1;        // offending unit, when applicable
    std::string attribute;   // offending attribute, when applicable

    static Verdict pass() { return {}; }
    static Verdict fail(std::string cond, UnitId u, std::string attr) {
        return {false, std::move(cond), u, std::move(attr)};
    }
    explicit operator bool() const { return ok; }
};

inline Verdict check_uniqueness(const FStore& fs) {
    for (const auto& [id, unit] : fs.units) {
        std::set<std::string> seen;
        for (const auto& [a, v] : unit.pairs)
            if (!seen.insert(a).second)
                return Verdict::fail("Uniqueness", id, a);
    }
    return Verdict::pass();
}

// Units without a local PRED are not judged (they may receive one later
// in a derivation); callers re-check after every unification.
inline Verdict check_coherence(const FStore& fs, const GovernableFunctions& gov) {
    for (const auto& [id, unit] : fs.units) {
        const SemForm* p = unit.pred();
        if (!p) continue;
        for (const auto& [a, v] : unit.pairs) {
            if (!gov.contains(a)) continue;
            if (std::find(p->governed.begin(), p->governed.end(), a) == p->governed.end())
                return Verdict::fail("Coherence", id, a);
        }
    }
    return Verdict::pass();
}

// Basic mode: every governed function has an attribute. Strict mode
// additionally requires the governed value to be a unit with its own PRED.
inline Verdict check_completeness(const FStore& fs, const GovernableFunctions& gov,
                                  bool strict = false) {
    (void)gov;
    for (const auto& [id, unit] : fs.units) {
        const SemForm* p = unit.pred();
        if (!p) continue;
        for (const std::string& fn : p->governed) {
            const FValue* v = unit.find(fn);
            if (!v) return Verdict::fail("Completeness", id, fn);
            if (strict) {
                if (!is_unitref(*v)) return Verdict::fail("Completeness", id, fn);
                auto it = fs.units.find(std::get<UnitRef>(*v).target);
                if (it == fs.units.end() || !it->second.pred())
                    return Verdict::fail("Completeness", id, fn);
            }
        }
    }
    return Verdict::pass();
}

struct UnifyResult {
    bool ok = false;
    FStore store;                       // valid only when ok
    std::map<UnitId, UnitId> remap;     // every input id -> representative id
    std::string clash_attribute;
    UnitId clash_unit = -1;

    explicit operator bool() const { return ok; }
};

namespace detail {

struct UnionFind {
    std::map<UnitId, UnitId> parent;
    UnitId find(UnitId x) {
        auto it = parent.find(x);
        if (it == parent.end()) { parent[x] = x; return x; }
        if (it->second == x) return x;
        UnitId r = find(it->second);
        parent[x] = r;
        return r;
    }
    // Smaller id wins so results do not depend on argument order.
    UnitId unite(UnitId a, UnitId b) {
        a = find(a); b = find(b);
        if (a == b) return a;
        if (b < a) std::swap(a, b);
        parent[b] = a;
        return a;
    }
};

} // namespace detail

// Recursive unification of two units inside one store. On success the
// result satisfies Uniqueness and all unit refs point at representatives.
inline UnifyResult unify_units(UnitId a, UnitId b, const FStore& in) {
    if (!in.has(a) || !in.has(b))
        throw Error(ErrorKind::Data, "unify_units: unknown unit id");

    detail::UnionFind uf;
    for (const auto& [id, u] : in.units) uf.find(id);

    // Merged pair lists per representative, refs still raw.
    std::map<UnitId, std::vector<std::pair<std::string, FValue>>> pairs;
    for (const auto& [id, u] : in.units) pairs[id] = u.pairs;

    UnifyResult res;
    std::deque<std::pair<UnitId, UnitId>> work{{a, b}};
    while (!work.empty()) {
        auto [x, y] = work.front();
        work.pop_front();
        x = uf.find(x); y = uf.find(y);
        if (x == y) continue;
        UnitId rep = uf.unite(x, y);
        UnitId other = rep == x ? y : x;
        auto merged = std::move(pairs[rep]);
        for (auto& [attr, val] : pairs[other]) {
            auto slot = std::find_if(merged.begin(), merged.end(),
                                     [&](const auto& p) { return p.first == attr; });
            if (slot == merged.end()) {
                merged.emplace_back(attr, std::move(val));
                continue;
            }
            FValue& have = slot->second;
            if (is_atom(have) && is_atom(val)) {
                if (std::get<Atom>(have) != std::get<Atom>(val)) {
                    res.clash_attribute = attr;
                    res.clash_unit = rep;
                    return res;
                }
            } else if (is_semform(have) && is_semform(val)) {
                if (std::get<SemForm>(have).instance != std::get<SemForm>(val).instance) {
                    res.clash_attribute = attr;
                    res.clash_unit = rep;
                    return res;
                }
            } else if (is_unitref(have) && is_unitref(val)) {
                work.emplace_back(std::get<UnitRef>(have).target, std::get<UnitRef>(val).target);
            } else {
                res.clash_attribute = attr;   // mixed kinds never unify
                res.clash_unit = rep;
                return res;
            }
        }
        pairs[rep] = std::move(merged);
        pairs.erase(other);
    }

    for (const auto& [id, u] : in.units) res.remap[id] = uf.find(id);
    for (auto& [rep, ps] : pairs) {
        FUnit u;
        u.id = rep;
        for (auto& [attr, val] : ps) {
            if (is_unitref(val)) val = FValue{UnitRef{uf.find(std::get<UnitRef>(val).target)}};
            u.pairs.emplace_back(attr, std::move(val));
        }
        res.store.units[rep] = std::move(u);
    }
    res.store.outer = in.outer >= 0 ? uf.find(in.outer) : -1;
    res.ok = true;
    return res;
}

} // namespace lfgdop

#endif

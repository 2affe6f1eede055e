#ifndef LFGDOP_BANK_HPP
#define LFGDOP_BANK_HPP

// Fragment bank: two counted bags (Root/Frontier vs Discard) with the
// simple and discounted relative-frequency estimators. Discounting is
// Turing-Good: mass n1/N is reserved for the Discard bag, where n1 is
// the number of Root/Frontier singleton types and N their token count.

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lfgdop/canonical.hpp"
#include "lfgdop/fragment.hpp"

namespace lfgdop {

enum class Estimator { SimpleRf, DiscountedRf };

inline const char* estimator_name(Estimator e) {
    return e == Estimator::SimpleRf ? "simple" : "discounted";
}

struct BankEntry {
    Fragment fragment;
    std::string canonical;
    long freq = 0;
    double p = 0.0;       // under the bank's estimator
    double log_p = 0.0;
};

// Fragments sharing a c-structure shape behave identically during
// category-matching chart construction; the chart works on shape
// classes and the disambiguator expands them into members.
struct YieldElem {
    enum Kind { Word, Slot } kind = Word;
    std::string text;   // word form, or slot category
};

struct ShapeClass {
    std::string tree_key;
    CTree tree;                       // representative
    std::string root_category;
    std::vector<YieldElem> yield;
    std::vector<const BankEntry*> members;   // sorted: log_p desc, canonical asc
};

struct FragmentBank {
    std::map<std::string, BankEntry> rf_bag;        // canonical -> entry
    std::map<std::string, BankEntry> discard_bag;
    long rf_tokens = 0;        // N
    long discard_tokens = 0;
    long n1 = 0;               // RF singleton types
    Estimator estimator = Estimator::DiscountedRf;
    double reservation = 0.0;  // mass assigned to the Discard bag
    bool reservation_clamped = false;

    std::map<std::string, ShapeClass> shapes;                            // tree key -> class
    std::map<std::string, std::vector<const ShapeClass*>> by_root;       // root category -> shapes
    std::map<std::string, std::vector<const BankEntry*>> root_category_index;

    const BankEntry* find(const std::string& canonical) const {
        auto it = rf_bag.find(canonical);
        if (it != rf_bag.end()) return &it->second;
        it = discard_bag.find(canonical);
        if (it != discard_bag.end()) return &it->second;
        return nullptr;
    }
};

namespace detail {

inline std::vector<YieldElem> fragment_yield(const CTree& t) {
    std::vector<YieldElem> out;
    for (NodeId n : t.leaves()) {
        const CNode& node = t.at(n);
        out.push_back({node.kind == NodeKind::Terminal ? YieldElem::Word : YieldElem::Slot,
                       node.label});
    }
    return out;
}

inline void index_bank(FragmentBank& bank) {
    bank.shapes.clear();
    bank.by_root.clear();
    bank.root_category_index.clear();
    auto add = [&](const BankEntry& e) {
        std::string key = tree_canonical(e.fragment.cstruct);
        auto [it, fresh] = bank.shapes.emplace(key, ShapeClass{});
        if (fresh) {
            it->second.tree_key = key;
            it->second.tree = e.fragment.cstruct;
            it->second.root_category = e.fragment.root_category();
            it->second.yield = fragment_yield(e.fragment.cstruct);
        }
        it->second.members.push_back(&e);
        bank.root_category_index[e.fragment.root_category()].push_back(&e);
    };
    for (const auto& [k, e] : bank.rf_bag) add(e);
    for (const auto& [k, e] : bank.discard_bag) add(e);
    for (auto& [key, shape] : bank.shapes) {
        std::sort(shape.members.begin(), shape.members.end(),
                  [](const BankEntry* a, const BankEntry* b) {
                      if (a->log_p != b->log_p) return a->log_p > b->log_p;
                      return a->canonical < b->canonical;
                  });
        bank.by_root[shape.root_category].push_back(&shape);
    }
}

} // namespace detail

inline void estimate_bank(FragmentBank& bank, Estimator estimator);

inline FragmentBank build_bank(const FragmentMultiset& fragments, Estimator estimator) {
    if (fragments.items.empty())
        throw Error(ErrorKind::Data, "build_bank: empty fragment multiset");

    FragmentBank bank;
    bank.estimator = estimator;
    for (const auto& [canon, item] : fragments.items) {
        if (item.rf > 0) {
            BankEntry e;
            e.fragment = item.fragment;
            e.fragment.provenance = Provenance::RootFrontier;
            e.canonical = canon;
            e.freq = item.rf;
            bank.rf_tokens += e.freq;
            if (e.freq == 1) ++bank.n1;
            bank.rf_bag.emplace(canon, std::move(e));
        }
        if (item.discard > 0) {
            BankEntry e;
            e.fragment = item.fragment;
            e.fragment.provenance = Provenance::Discard;
            e.canonical = canon;
            e.freq = item.discard;
            bank.discard_tokens += e.freq;
            bank.discard_bag.emplace(canon, std::move(e));
        }
    }
    if (bank.rf_tokens == 0)
        throw Error(ErrorKind::Data, "build_bank: no Root/Frontier fragments");

    estimate_bank(bank, estimator);
    return bank;
}

// Recompute probabilities under the given estimator; the bags and the
// shape index survive, only weights and member order change.
inline void estimate_bank(FragmentBank& bank, Estimator estimator) {
    bank.estimator = estimator;
    if (bank.discard_bag.empty()) {
        bank.reservation = 0.0;   // all mass stays with Root/Frontier
    } else {
        double r = static_cast<double>(bank.n1) / static_cast<double>(bank.rf_tokens);
        if (r > 0.5) {
            bank.reservation = 0.5;
            bank.reservation_clamped = true;
        } else {
            bank.reservation = r;
        }
    }

    long all_tokens = bank.rf_tokens + bank.discard_tokens;
    for (auto& [k, e] : bank.rf_bag) {
        if (estimator == Estimator::SimpleRf)
            e.p = static_cast<double>(e.freq) / static_cast<double>(all_tokens);
        else
            e.p = static_cast<double>(e.freq) / static_cast<double>(bank.rf_tokens) *
                  (1.0 - bank.reservation);
        e.log_p = std::log(e.p);
    }
    for (auto& [k, e] : bank.discard_bag) {
        if (estimator == Estimator::SimpleRf)
            e.p = static_cast<double>(e.freq) / static_cast<double>(all_tokens);
        else
            e.p = static_cast<double>(e.freq) / static_cast<double>(bank.discard_tokens) *
                  bank.reservation;
        e.log_p = e.p > 0.0 ? std::log(e.p) : -std::numeric_limits<double>::infinity();
    }
    detail::index_bank(bank);
}

inline double fragment_probability(const FragmentBank& bank, const std::string& canonical) {
    const BankEntry* e = bank.find(canonical);
    if (!e) throw Error(ErrorKind::Data, "fragment_probability: unknown fragment");
    return std::exp(e->log_p);
}
inline double fragment_probability(const FragmentBank& bank, const Fragment& f) {
    return fragment_probability(bank, canonical_form(f));
}

// CP(f | CS) = P(f) / sum of P over the set (Eq. 3); invariant under a
// common rescaling of all P.
inline double competition_probability(const std::string& canonical,
                                      const std::vector<const BankEntry*>& cs) {
    const BankEntry* self = nullptr;
    double denom = 0.0;
    for (const BankEntry* e : cs) {
        denom += std::exp(e->log_p);
        if (!self && e->canonical == canonical) self = e;
    }
    if (!self) throw Error(ErrorKind::Data, "competition_probability: fragment not in set");
    if (denom <= 0.0) throw Error(ErrorKind::Data, "competition_probability: zero-mass set");
    return std::exp(self->log_p) / denom;
}

inline double derivation_probability(const std::vector<double>& step_cps) {
    double lp = 0.0;
    for (double cp : step_cps) lp += std::log(cp);
    return std::exp(lp);
}

inline double representation_probability(const std::vector<double>& derivation_probs) {
    double p = 0.0;
    for (double d : derivation_probs) p += d;
    return p;
}

// ---------------------------------------------------------------------
// Deterministic text dump: provenance, frequency, canonical form per line.

inline std::string dump_bank(const FragmentBank& bank) {
    std::string out;
    for (const auto& [k, e] : bank.rf_bag)
        out += "RF\t" + std::to_string(e.freq) + "\t" + k + "\n";
    for (const auto& [k, e] : bank.discard_bag)
        out += "DS\t" + std::to_string(e.freq) + "\t" + k + "\n";
    return out;
}

inline FragmentBank load_bank(const std::string& text, Estimator estimator) {
    FragmentMultiset ms;
    long instances = 0;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        size_t t1 = line.find('\t');
        size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos)
            throw Error(ErrorKind::Data, "bank dump line " + std::to_string(lineno) + ": bad format");
        std::string prov = line.substr(0, t1);
        long freq = std::stol(line.substr(t1 + 1, t2 - t1 - 1));
        std::string canon = line.substr(t2 + 1);
        if (freq <= 0)
            throw Error(ErrorKind::Data, "bank dump line " + std::to_string(lineno) + ": bad frequency");
        Fragment f(parse_canonical(canon, &instances),
                   prov == "DS" ? Provenance::Discard : Provenance::RootFrontier);
        ms.add(f, freq);
    }
    return build_bank(ms, estimator);
}

} // namespace lfgdop

#endif

#ifndef LFGDOP_SCORE_HPP
#define LFGDOP_SCORE_HPP

// Scoring: exact match and PARSEVAL precision/recall, with the LFG
// extension that a correct constituent must also phi-correspond to an
// equal f-structure unit.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lfgdop/canonical.hpp"
#include "lfgdop/representation.hpp"

namespace lfgdop {

// Recursive equality of two units across stores: same attributes, equal
// atoms, semforms equal by predicate and governed list (instance ids are
// store-local artifacts), refs compared structurally with a re-entrancy
// guard.
inline bool fstructure_equal(UnitId a, const FStore& sa, UnitId b, const FStore& sb,
                             std::set<std::pair<UnitId, UnitId>>* visited = nullptr) {
    std::set<std::pair<UnitId, UnitId>> local;
    if (!visited) visited = &local;
    if (!visited->insert({a, b}).second) return true;

    const FUnit& ua = sa.at(a);
    const FUnit& ub = sb.at(b);
    if (ua.pairs.size() != ub.pairs.size()) return false;
    for (const auto& [attr, va] : ua.pairs) {
        const FValue* vb = ub.find(attr);
        if (!vb) return false;
        if (is_atom(va)) {
            if (!is_atom(*vb) || std::get<Atom>(va) != std::get<Atom>(*vb)) return false;
        } else if (is_semform(va)) {
            if (!is_semform(*vb)) return false;
            const SemForm& fa = std::get<SemForm>(va);
            const SemForm& fb = std::get<SemForm>(*vb);
            if (fa.predicate != fb.predicate || fa.governed != fb.governed) return false;
        } else {
            if (!is_unitref(*vb)) return false;
            if (!fstructure_equal(std::get<UnitRef>(va).target, sa,
                                  std::get<UnitRef>(*vb).target, sb, visited))
                return false;
        }
    }
    return true;
}

struct Constituent {
    int start = 0;
    int end = 0;
    std::string label;
    UnitId unit = -1;
};

// Internal nodes excluding preterminal word nodes (a node dominating
// exactly one terminal), standard PARSEVAL practice.
inline std::vector<Constituent> constituents(const Representation& r) {
    std::vector<Constituent> out;
    struct Walker {
        const Representation& r;
        std::vector<Constituent>& out;
        int walk(NodeId n, int pos) {
            const CNode& node = r.cstruct.at(n);
            if (node.kind != NodeKind::Internal) return pos + 1;
            int start = pos;
            for (NodeId c : node.children) pos = walk(c, pos);
            bool preterminal_word =
                node.children.size() == 1 &&
                r.cstruct.at(node.children[0]).kind == NodeKind::Terminal;
            if (!preterminal_word)
                out.push_back({start, pos, node.label, r.phi_of(n)});
            return pos;
        }
    } w{r, out};
    w.walk(r.cstruct.root, 0);
    std::sort(out.begin(), out.end(), [](const Constituent& a, const Constituent& b) {
        if (a.start != b.start) return a.start < b.start;
        if (a.end != b.end) return a.end < b.end;
        return a.label < b.label;
    });
    return out;
}

struct SentenceScore {
    int id = 0;
    bool exact = false;
    long correct = 0;
    long proposed = 0;
    long gold = 0;
};

enum class EvalMode { Full, TreeOnly };

inline bool exact_match(const Representation& proposed, const Representation& gold,
                        EvalMode mode) {
    if (mode == EvalMode::TreeOnly)
        return tree_canonical(proposed.cstruct) == tree_canonical(gold.cstruct);
    return canonical_form(proposed) == canonical_form(gold);
}

// A proposed constituent is correct if an unused gold constituent has
// the same label and span (and, in full mode, an equal phi image); gold
// constituents are consumed at most once, left to right.
inline SentenceScore score_pair(const Representation& proposed, const Representation& gold,
                                EvalMode mode) {
    if (proposed.cstruct.terminal_yield() != gold.cstruct.terminal_yield())
        throw Error(ErrorKind::Data, "score: token sequences differ");

    auto prop = constituents(proposed);
    auto gld = constituents(gold);
    std::vector<bool> used(gld.size(), false);

    SentenceScore s;
    s.proposed = static_cast<long>(prop.size());
    s.gold = static_cast<long>(gld.size());
    for (const Constituent& p : prop) {
        for (size_t i = 0; i < gld.size(); ++i) {
            if (used[i]) continue;
            const Constituent& g = gld[i];
            if (g.start != p.start || g.end != p.end || g.label != p.label) continue;
            if (mode == EvalMode::Full) {
                bool both_unlinked = p.unit < 0 && g.unit < 0;
                if (!both_unlinked) {
                    if (p.unit < 0 || g.unit < 0) continue;
                    if (!fstructure_equal(p.unit, proposed.fstruct, g.unit, gold.fstruct))
                        continue;
                }
            }
            used[i] = true;
            ++s.correct;
            break;
        }
    }
    s.exact = exact_match(proposed, gold, mode);
    return s;
}

inline SentenceScore score_lfg(const Representation& proposed, const Representation& gold) {
    return score_pair(proposed, gold, EvalMode::Full);
}
inline SentenceScore score_tree(const Representation& proposed, const Representation& gold) {
    return score_pair(proposed, gold, EvalMode::TreeOnly);
}

struct ScoreReport {
    std::vector<SentenceScore> sentences;

    long total_correct() const {
        long t = 0;
        for (const auto& s : sentences) t += s.correct;
        return t;
    }
    long total_proposed() const {
        long t = 0;
        for (const auto& s : sentences) t += s.proposed;
        return t;
    }
    long total_gold() const {
        long t = 0;
        for (const auto& s : sentences) t += s.gold;
        return t;
    }
    double precision() const {
        long p = total_proposed();
        return p == 0 ? 0.0 : static_cast<double>(total_correct()) / p;
    }
    double recall() const {
        long g = total_gold();
        return g == 0 ? 0.0 : static_cast<double>(total_correct()) / g;
    }
    double exact_match_rate() const {
        if (sentences.empty()) return 0.0;
        long e = 0;
        for (const auto& s : sentences) e += s.exact ? 1 : 0;
        return static_cast<double>(e) / sentences.size();
    }

    std::string to_csv() const {
        std::string out = "sentence,exact,correct,proposed,gold\n";
        for (const auto& s : sentences)
            out += std::to_string(s.id) + "," + (s.exact ? "1" : "0") + "," +
                   std::to_string(s.correct) + "," + std::to_string(s.proposed) + "," +
                   std::to_string(s.gold) + "\n";
        return out;
    }
};

} // namespace lfgdop

#endif

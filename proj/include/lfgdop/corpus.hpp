#ifndef LFGDOP_CORPUS_HPP
#define LFGDOP_CORPUS_HPP

// Corpus file format (indexed-tree notation) and the train/test split.
//
//   #id: 1
//   #sent: Kim eats
//   #tree: (S.1 (NP.2 Kim.2) (VP.1 eats.1))
//   #fs:
//   1 -> [(SUBJ 2) (TENSE PRES) (PRED 'eat<SUBJ>')]
//   2 -> [(PRED 'Kim') (NUM SG)]
//
// A bare number value is a unit reference; quoted values are semantic
// forms and get a fresh instance per occurrence.

#include <cctype>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lfgdop/fragment.hpp"
#include "lfgdop/representation.hpp"

namespace lfgdop {

struct CorpusEntry {
    int id = 0;
    std::vector<std::string> tokens;
    Representation gold;
};

struct Corpus {
    std::vector<CorpusEntry> entries;
    std::set<std::string> vocabulary;
    long semform_instances = 0;   // mint counter, continued by later parses

    const CorpusEntry* find(int id) const {
        for (const auto& e : entries)
            if (e.id == id) return &e;
        return nullptr;
    }
};

namespace detail {

struct CorpusParser {
    std::istringstream in;
    int lineno = 0;
    std::string line;
    bool have_line = false;

    explicit CorpusParser(const std::string& text) : in(text) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorKind::Data, "corpus line " + std::to_string(lineno) + ": " + msg);
    }

    bool next_line() {
        if (have_line) { have_line = false; return true; }
        while (std::getline(in, line)) {
            ++lineno;
            return true;
        }
        return false;
    }
    void push_back_line() { have_line = true; }

    static std::string strip(const std::string& s) {
        size_t a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        size_t b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    static bool all_digits(const std::string& s) {
        if (s.empty()) return false;
        for (char c : s)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        return true;
    }
    static bool valid_symbol(const std::string& s) {
        if (s.empty()) return false;
        for (char c : s) {
            if (std::isspace(static_cast<unsigned char>(c))) return false;
            switch (c) {
            case '(': case ')': case '[': case ']': case '\'':
            case '<': case '>': case ',': case '#': case '.': case '*':
                return false;
            default: break;
            }
        }
        return true;
    }

    // ---- indexed tree -------------------------------------------------
    struct TreeCtx {
        Representation* repr;
        std::map<int, UnitId>* unit_of;
        NodeId next_node = 0;
    };

    UnitId unit_for(TreeCtx& ctx, int idx) {
        auto [it, fresh] = ctx.unit_of->emplace(idx, static_cast<UnitId>(ctx.unit_of->size()) + 1);
        if (fresh) {
            FUnit u;
            u.id = it->second;
            ctx.repr->fstruct.units[it->second] = u;
        }
        return it->second;
    }

    NodeId parse_tree(const std::string& s, size_t& pos, TreeCtx& ctx) {
        auto skip = [&] { while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos; };
        auto word = [&]() -> std::string {
            size_t start = pos;
            while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) &&
                   s[pos] != '(' && s[pos] != ')' && s[pos] != '.')
                ++pos;
            if (pos == start) fail("expected a symbol in #tree");
            return s.substr(start, pos - start);
        };
        auto index = [&]() -> int {
            if (pos >= s.size() || s[pos] != '.') fail("every tree node needs a .index");
            ++pos;
            size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (pos == start) fail("bad index in #tree");
            return std::stoi(s.substr(start, pos - start));
        };

        skip();
        if (pos < s.size() && s[pos] == '(') {
            ++pos;
            skip();
            std::string cat = word();
            if (!valid_symbol(cat)) fail("bad category '" + cat + "'");
            int idx = index();
            NodeId id = ctx.next_node++;
            CNode n;
            n.id = id;
            n.label = cat;
            n.kind = NodeKind::Internal;
            skip();
            while (pos < s.size() && s[pos] != ')') {
                n.children.push_back(parse_tree(s, pos, ctx));
                skip();
            }
            if (pos >= s.size()) fail("unbalanced parentheses in #tree");
            ++pos;   // ')'
            if (n.children.empty()) fail("internal node without children");
            ctx.repr->cstruct.nodes[id] = n;
            ctx.repr->phi[id] = unit_for(ctx, idx);
            return id;
        }
        std::string w = word();
        if (!valid_symbol(w)) fail("bad word '" + w + "'");
        int idx = index();
        NodeId id = ctx.next_node++;
        CNode n;
        n.id = id;
        n.label = w;
        n.kind = NodeKind::Terminal;
        ctx.repr->cstruct.nodes[id] = n;
        ctx.repr->phi[id] = unit_for(ctx, idx);
        return id;
    }

    // ---- unit definitions ---------------------------------------------
    void parse_unitdef(const std::string& s, TreeCtx& ctx, long* instances,
                       std::set<int>* defined) {
        size_t pos = 0;
        auto skip = [&] { while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos; };
        auto expect = [&](char c) {
            skip();
            if (pos >= s.size() || s[pos] != c) fail(std::string("expected '") + c + "' in unit definition");
            ++pos;
        };
        auto token = [&]() -> std::string {
            skip();
            size_t start = pos;
            while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) &&
                   s[pos] != '(' && s[pos] != ')' && s[pos] != '[' && s[pos] != ']')
                ++pos;
            if (pos == start) fail("expected a token in unit definition");
            return s.substr(start, pos - start);
        };

        skip();
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) fail("unit definition must start with an index");
        int idx = std::stoi(s.substr(start, pos - start));
        if (defined && !defined->insert(idx).second)
            fail("unit " + std::to_string(idx) + " defined twice");
        skip();
        if (pos + 1 >= s.size() || s[pos] != '-' || s[pos + 1] != '>') fail("expected '->'");
        pos += 2;
        expect('[');

        UnitId uid = unit_for(ctx, idx);
        FUnit& unit = ctx.repr->fstruct.at(uid);
        while (true) {
            skip();
            if (pos < s.size() && s[pos] == ']') { ++pos; break; }
            expect('(');
            std::string attr = token();
            if (!valid_symbol(attr)) fail("bad attribute '" + attr + "'");
            skip();
            FValue val;
            if (pos < s.size() && s[pos] == '\'') {
                ++pos;
                size_t p0 = pos;
                while (pos < s.size() && s[pos] != '<' && s[pos] != '\'') ++pos;
                SemForm sf;
                sf.predicate = s.substr(p0, pos - p0);
                if (sf.predicate.empty()) fail("empty predicate");
                if (pos < s.size() && s[pos] == '<') {
                    ++pos;
                    std::string fn;
                    while (pos < s.size() && s[pos] != '>') {
                        if (s[pos] == ',') {
                            if (fn.empty()) fail("bad governed list");
                            sf.governed.push_back(fn);
                            fn.clear();
                        } else {
                            fn += s[pos];
                        }
                        ++pos;
                    }
                    if (pos >= s.size()) fail("unterminated governed list");
                    ++pos;
                    if (fn.empty()) fail("bad governed list");
                    sf.governed.push_back(fn);
                }
                if (pos >= s.size() || s[pos] != '\'') fail("unterminated semantic form");
                ++pos;
                sf.instance = ++*instances;
                val = sf;
            } else {
                std::string tok = token();
                if (all_digits(tok)) val = UnitRef{unit_for(ctx, std::stoi(tok))};
                else if (valid_symbol(tok)) val = Atom{tok};
                else fail("bad value '" + tok + "'");
            }
            expect(')');
            if (unit.has(attr))
                throw Error(ErrorKind::Data,
                            "corpus line " + std::to_string(lineno) + ": Uniqueness failure, attribute " +
                                attr + " occurs twice in unit " + std::to_string(idx));
            unit.set(attr, std::move(val));
        }
        skip();
        if (pos != s.size()) fail("trailing garbage after unit definition");
    }
};

} // namespace detail

struct CorpusOptions {
    ValidityOptions validity;
    bool validate = true;
};

inline Corpus parse_corpus_file(const std::string& text, const CorpusOptions& opts = {}) {
    detail::CorpusParser p(text);
    Corpus corpus;

    while (p.next_line()) {
        std::string s = detail::CorpusParser::strip(p.line);
        if (s.empty()) continue;
        if (s.rfind("#id:", 0) != 0) p.fail("expected '#id:'");

        CorpusEntry entry;
        std::string idtext = detail::CorpusParser::strip(s.substr(4));
        if (!detail::CorpusParser::all_digits(idtext)) p.fail("bad sentence id '" + idtext + "'");
        entry.id = std::stoi(idtext);

        if (!p.next_line()) p.fail("missing '#sent:'");
        s = detail::CorpusParser::strip(p.line);
        if (s.rfind("#sent:", 0) != 0) p.fail("expected '#sent:'");
        {
            std::istringstream ts(s.substr(6));
            std::string tok;
            while (ts >> tok) entry.tokens.push_back(tok);
            if (entry.tokens.empty()) p.fail("empty sentence");
        }

        if (!p.next_line()) p.fail("missing '#tree:'");
        s = detail::CorpusParser::strip(p.line);
        if (s.rfind("#tree:", 0) != 0) p.fail("expected '#tree:'");
        std::map<int, UnitId> unit_of;
        detail::CorpusParser::TreeCtx ctx{&entry.gold, &unit_of};
        {
            std::string tree_text = s.substr(6);
            size_t pos = 0;
            entry.gold.cstruct.root = p.parse_tree(tree_text, pos, ctx);
            while (pos < tree_text.size() && std::isspace(static_cast<unsigned char>(tree_text[pos]))) ++pos;
            if (pos != tree_text.size()) p.fail("trailing garbage after #tree");
        }

        if (!p.next_line()) p.fail("missing '#fs:'");
        s = detail::CorpusParser::strip(p.line);
        if (s != "#fs:") p.fail("expected '#fs:'");

        std::set<int> defined;
        while (p.next_line()) {
            std::string u = detail::CorpusParser::strip(p.line);
            if (u.empty()) break;
            if (u.rfind("#id:", 0) == 0) { p.push_back_line(); break; }
            p.parse_unitdef(u, ctx, &corpus.semform_instances, &defined);
        }
        if (defined.empty()) p.fail("entry has no unit definitions");

        // Every index used in the tree or as a reference must be defined.
        for (const auto& [idx, uid] : unit_of)
            if (!defined.count(idx))
                throw Error(ErrorKind::Data, "corpus entry " + std::to_string(entry.id) +
                                                 ": dangling index " + std::to_string(idx));

        entry.gold.fstruct.outer = entry.gold.phi_of(entry.gold.cstruct.root);

        if (opts.validate) {
            check_structure(entry.gold);
            if (!entry.gold.closed())
                throw Error(ErrorKind::Data, "corpus entry " + std::to_string(entry.id) +
                                                 ": open frontier slot");
            if (entry.gold.cstruct.terminal_yield() != entry.tokens)
                throw Error(ErrorKind::Data, "corpus entry " + std::to_string(entry.id) +
                                                 ": #sent does not match the tree yield");
            if (Verdict v = check_valid(entry.gold, opts.validity); !v)
                throw Error(ErrorKind::Data, "corpus entry " + std::to_string(entry.id) + ": " +
                                                 v.condition + " failure" +
                                                 (v.attribute.empty() ? "" : " on " + v.attribute));
        }
        for (const auto& t : entry.tokens) corpus.vocabulary.insert(t);
        corpus.entries.push_back(std::move(entry));
    }
    if (corpus.entries.empty()) throw Error(ErrorKind::Data, "empty corpus");
    return corpus;
}

// Serialization mirrors the input grammar; unit numbering follows the
// canonical first-visit order.
inline std::string serialize_entry(const CorpusEntry& entry) {
    detail::CanonicalNumbering num;
    IndexedTree it = index_tree(entry.gold);
    for (NodeId n : entry.gold.cstruct.preorder()) num.visit(entry.gold.fstruct, it.index.at(n));

    std::string out = "#id: " + std::to_string(entry.id) + "\n#sent:";
    for (const auto& t : entry.tokens) out += " " + t;
    out += "\n#tree: ";

    struct Render {
        const Representation& r;
        const IndexedTree& it;
        const detail::CanonicalNumbering& num;
        std::string go(NodeId n) const {
            const CNode& node = r.cstruct.at(n);
            std::string idx = "." + std::to_string(num.unit_no.at(it.index.at(n)));
            if (node.kind == NodeKind::Terminal) return node.label + idx;
            std::string s = "(" + node.label + idx;
            for (NodeId c : node.children) s += " " + go(c);
            return s + ")";
        }
    } render{entry.gold, it, num};
    out += render.go(entry.gold.cstruct.root);
    out += "\n#fs:\n";

    for (size_t i = 0; i < num.order.size(); ++i) {
        UnitId id = num.order[i];
        out += std::to_string(i + 1) + " -> [";
        auto pairs = entry.gold.fstruct.at(id).pairs;
        std::sort(pairs.begin(), pairs.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        bool first = true;
        for (const auto& [attr, val] : pairs) {
            if (!first) out += " ";
            first = false;
            out += "(" + attr + " ";
            if (is_atom(val)) out += std::get<Atom>(val).symbol;
            else if (is_unitref(val))
                out += std::to_string(num.unit_no.at(std::get<UnitRef>(val).target));
            else {
                const SemForm& sf = std::get<SemForm>(val);
                out += "'" + sf.predicate;
                if (!sf.governed.empty()) {
                    out += "<";
                    for (size_t k = 0; k < sf.governed.size(); ++k)
                        out += (k ? "," : "") + sf.governed[k];
                    out += ">";
                }
                out += "'";
            }
            out += ")";
        }
        out += "]\n";
    }
    out += "\n";
    return out;
}

inline std::string serialize_corpus(const Corpus& corpus) {
    std::string out;
    for (const auto& e : corpus.entries) out += serialize_entry(e);
    return out;
}

// ---------------------------------------------------------------------
// Train/test split with the closed-vocabulary constraint: every test
// word must occur in the training set. Violating test sentences are
// moved to train and backfilled from the remaining pool.

struct Split {
    std::vector<int> train_ids;
    std::vector<int> test_ids;
};

inline Split split_corpus(const Corpus& corpus, double ratio, std::uint64_t seed,
                          int max_retries = 1000) {
    if (ratio <= 0.0 || ratio >= 1.0)
        throw Error(ErrorKind::Usage, "split ratio must be in (0,1)");
    size_t n = corpus.entries.size();
    size_t n_test = static_cast<size_t>(n * (1.0 - ratio) + 0.5);
    if (n_test == 0) n_test = 1;
    if (n_test >= n) throw Error(ErrorKind::Data, "corpus too small to split");

    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    for (size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

    std::vector<size_t> test(order.begin(), order.begin() + n_test);
    std::vector<size_t> pool(order.begin() + n_test, order.end());
    std::set<size_t> in_test(test.begin(), test.end());

    auto train_vocab = [&]() {
        std::map<std::string, long> counts;
        for (size_t i = 0; i < n; ++i) {
            if (in_test.count(i)) continue;
            for (const auto& t : corpus.entries[i].tokens) ++counts[t];
        }
        return counts;
    };

    int retries = 0;
    while (true) {
        auto vocab = train_vocab();
        size_t violator = n;
        for (size_t i : test) {
            for (const auto& t : corpus.entries[i].tokens)
                if (!vocab.count(t)) { violator = i; break; }
            if (violator != n) break;
        }
        if (violator == n) break;
        if (++retries > max_retries)
            throw Error(ErrorKind::Data, "no vocabulary-closed split found");

        // The violator joins the training set for good; backfill from the pool.
        in_test.erase(violator);
        test.erase(std::find(test.begin(), test.end(), violator));
        if (pool.empty())
            throw Error(ErrorKind::Data, "no vocabulary-closed split found");
        size_t cand = pool.front();
        pool.erase(pool.begin());
        in_test.insert(cand);
        test.push_back(cand);
    }

    Split out;
    for (size_t i = 0; i < n; ++i)
        (in_test.count(i) ? out.test_ids : out.train_ids).push_back(corpus.entries[i].id);
    return out;
}

inline FragmentMultiset extract_fragments(const Corpus& corpus, const EnumerateOptions& opts) {
    FragmentMultiset all;
    for (const auto& e : corpus.entries) all.merge(enumerate_fragments(e.gold, opts));
    return all;
}

inline Corpus subset_corpus(const Corpus& corpus, const std::vector<int>& ids) {
    Corpus out;
    out.semform_instances = corpus.semform_instances;
    std::set<int> want(ids.begin(), ids.end());
    for (const auto& e : corpus.entries)
        if (want.count(e.id)) {
            out.entries.push_back(e);
            for (const auto& t : e.tokens) out.vocabulary.insert(t);
        }
    return out;
}

} // namespace lfgdop

#endif

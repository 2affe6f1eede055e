#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "lfgdop/fragment.hpp"

using namespace lfgdop;

namespace {

const char* kPPEntry = R"(#id: 1
#sent: the man sees a dog with the telescope
#tree: (S.1 (NP.2 the.2 man.2) (VP.1 sees.1 (NP.3 a.3 dog.3) (PP.4 with.4 (NP.5 the.5 telescope.5))))
#fs:
1 -> [(SUBJ 2) (OBJ 3) (PMOD 4) (TENSE PRES) (PRED 'see<SUBJ,OBJ>')]
2 -> [(PRED 'man') (NUM SG) (DEF yes)]
3 -> [(PRED 'dog') (NUM SG) (DEF no)]
4 -> [(PRED 'with<OBJ>') (OBJ 5)]
5 -> [(PRED 'telescope') (NUM SG) (DEF yes)]

)";

Representation pp_fixture() {
    return parse_corpus_file(kPPEntry).entries[0].gold;
}

// ---------------------------------------------------------------------
// Independent decomposition oracle: enumerates fragments straight from
// the Root/Frontier definitions (erasure sets, phi-accessibility and
// semform survival recomputed from scratch, no reuse of the ops).

std::set<NodeId> strict_descendants(const CTree& t, const std::set<NodeId>& roots) {
    std::set<NodeId> out;
    for (NodeId r : roots) {
        auto sub = t.subtree(r);
        sub.erase(r);
        out.insert(sub.begin(), sub.end());
    }
    return out;
}

Fragment oracle_fragment(const Representation& repr, NodeId root,
                         const std::set<NodeId>& frontier) {
    std::set<NodeId> in_subtree = repr.cstruct.subtree(root);
    std::set<NodeId> cut_below = strict_descendants(repr.cstruct, frontier);
    std::set<NodeId> kept;
    for (NodeId n : in_subtree)
        if (!cut_below.count(n)) kept.insert(n);

    Fragment f;
    f.provenance = Provenance::RootFrontier;
    f.cstruct.root = root;
    for (NodeId n : kept) {
        CNode node = repr.cstruct.at(n);
        if (frontier.count(n)) {
            node.kind = NodeKind::FrontierSlot;
            node.children.clear();
        }
        f.cstruct.nodes[n] = node;
        UnitId u = repr.phi_of(n);
        if (u >= 0) f.phi[n] = u;
    }

    // reachability recomputed with a plain worklist
    std::set<UnitId> access;
    std::vector<UnitId> work;
    for (NodeId n : kept) {
        UnitId u = repr.phi_of(n);
        if (u >= 0) work.push_back(u);
    }
    while (!work.empty()) {
        UnitId u = work.back();
        work.pop_back();
        if (!access.insert(u).second) continue;
        for (const auto& [a, v] : repr.fstruct.at(u).pairs)
            if (is_unitref(v)) work.push_back(std::get<UnitRef>(v).target);
    }

    std::set<UnitId> root_erased_images, kept_images, frontier_cut_images;
    for (const auto& [n, node] : repr.cstruct.nodes) {
        UnitId u = repr.phi_of(n);
        if (u < 0) continue;
        if (!in_subtree.count(n)) root_erased_images.insert(u);
        if (in_subtree.count(n)) kept_images.insert(u);
        if (cut_below.count(n)) frontier_cut_images.insert(u);
    }

    for (UnitId u : access) {
        FUnit unit = repr.fstruct.at(u);
        bool kill_semforms = (root_erased_images.count(u) && !kept_images.count(u)) ||
                             frontier_cut_images.count(u);
        if (kill_semforms) {
            auto& ps = unit.pairs;
            ps.erase(std::remove_if(ps.begin(), ps.end(),
                                    [](const auto& p) { return is_semform(p.second); }),
                     ps.end());
        }
        f.fstruct.units[u] = std::move(unit);
    }
    f.fstruct.outer = f.phi_of(root);
    return f;
}

// every subset of internal non-root nodes, reduced to its effective
// antichain (dominated choices erase nothing extra)
std::map<std::string, long> oracle_rf_multiset(const Representation& repr, int max_depth) {
    std::map<std::string, long> out;
    for (const auto& [rid, rnode] : repr.cstruct.nodes) {
        if (rnode.kind != NodeKind::Internal) continue;
        auto inside = repr.cstruct.subtree(rid);
        std::vector<NodeId> eligible;
        for (NodeId n : inside)
            if (n != rid && repr.cstruct.at(n).kind == NodeKind::Internal)
                eligible.push_back(n);
        std::set<std::set<NodeId>> antichains;
        size_t subsets = size_t{1} << eligible.size();
        for (size_t mask = 0; mask < subsets; ++mask) {
            std::set<NodeId> chosen;
            for (size_t b = 0; b < eligible.size(); ++b)
                if (mask & (size_t{1} << b)) chosen.insert(eligible[b]);
            std::set<NodeId> cut = strict_descendants(repr.cstruct, chosen);
            std::set<NodeId> effective;
            for (NodeId n : chosen)
                if (!cut.count(n)) effective.insert(n);
            antichains.insert(effective);
        }
        for (const auto& ac : antichains) {
            Fragment f = oracle_fragment(repr, rid, ac);
            if (f.depth() > max_depth) continue;
            out[canonical_form(f)] += 1;
        }
    }
    return out;
}

long treedop_subtree_count(const CTree& t, NodeId n) {
    long ways = 1;
    for (NodeId c : t.at(n).children) {
        const CNode& child = t.at(c);
        if (child.kind == NodeKind::Internal) ways *= 1 + treedop_subtree_count(t, c);
    }
    return ways;
}

long treedop_total(const CTree& t) {
    long total = 0;
    for (const auto& [id, node] : t.nodes)
        if (node.kind == NodeKind::Internal) total += treedop_subtree_count(t, id);
    return total;
}

} // namespace

TEST_CASE("root_op reproduces Figures 2 and 3") {
    Corpus c = fixtures::kim_corpus();
    const Representation& kim = c.entries[0].gold;

    Fragment fig2 = root_op(kim, fixtures::find_node(kim, "NP"));
    CHECK(canonical_form(fig2) == "(NP.1 Kim.1) 1->[(NUM SG)(PRED 'Kim'#1)]");

    Fragment fig3 = root_op(kim, fixtures::find_node(kim, "VP"));
    CHECK(canonical_form(fig3) ==
          "(VP.1 eats.1) 1->[(PRED 'eat<SUBJ>'#1)(SUBJ 2)(TENSE PRES)] 2->[(NUM SG)]");

    // root selection at the root is the identity
    Fragment whole = root_op(kim, fixtures::find_node(kim, "S"));
    CHECK(canonical_form(whole) == canonical_form(kim));

    CHECK_THROWS_AS(root_op(kim, fixtures::find_node(kim, "Kim")), Error);
}

TEST_CASE("frontier_op reproduces Figure 4 and erases cut semforms") {
    Corpus c = fixtures::kim_corpus();
    const Representation& kim = c.entries[0].gold;
    Fragment whole = root_op(kim, fixtures::find_node(kim, "S"));

    Fragment fig4 = frontier_op(whole, {fixtures::find_node(kim, "NP")});
    CHECK(canonical_form(fig4) ==
          "(S.1 NP*.2 (VP.1 eats.1)) 1->[(PRED 'eat<SUBJ>'#1)(SUBJ 2)(TENSE PRES)] 2->[(NUM SG)]");

    // the empty set changes nothing
    CHECK(canonical_form(frontier_op(whole, {})) == canonical_form(whole));

    // cutting NP and VP erases both predicates but keeps TENSE
    Fragment both = frontier_op(whole, {fixtures::find_node(kim, "NP"),
                                        fixtures::find_node(kim, "VP")});
    CHECK(canonical_form(both) == "(S.1 NP*.2 VP*.1) 1->[(SUBJ 2)(TENSE PRES)] 2->[(NUM SG)]");

    CHECK_THROWS_AS(frontier_op(whole, {fixtures::find_node(kim, "S")}), Error);
    CHECK_THROWS_AS(frontier_op(whole, {fixtures::find_node(kim, "eats")}), Error);
}

TEST_CASE("frontier slots keep their phi link") {
    Corpus c = fixtures::kim_corpus();
    const Representation& kim = c.entries[0].gold;
    Fragment fig4 = frontier_op(root_op(kim, kim.cstruct.root),
                                {fixtures::find_node(kim, "NP")});
    NodeId slot = -1;
    for (const auto& [id, n] : fig4.cstruct.nodes)
        if (n.kind == NodeKind::FrontierSlot) slot = id;
    REQUIRE(slot >= 0);
    CHECK(fig4.phi.count(slot) == 1);
    CHECK(fig4.fstruct.has(fig4.phi.at(slot)));
}

TEST_CASE("discard candidates respect the correspondence condition") {
    Corpus c = fixtures::kim_corpus();
    const Representation& kim = c.entries[0].gold;
    Fragment fig4 = frontier_op(root_op(kim, kim.cstruct.root),
                                {fixtures::find_node(kim, "NP")});
    Fragment fig2 = root_op(kim, fixtures::find_node(kim, "NP"));

    SUBCASE("figure 4 with protected PRED: TENSE and NUM only") {
        auto cands = discard_candidates(fig4, true);
        REQUIRE(cands.size() == 2);
        CHECK(cands[0].second == "TENSE");
        CHECK(cands[1].second == "NUM");
    }
    SUBCASE("PRED becomes deletable without protection") {
        auto cands = discard_candidates(fig4, false);
        REQUIRE(cands.size() == 3);
        CHECK(cands[0].second == "PRED");
        CHECK(cands[1].second == "TENSE");
        CHECK(cands[2].second == "NUM");
    }
    SUBCASE("figure 2 with protected PRED: NUM only") {
        auto cands = discard_candidates(fig2, true);
        REQUIRE(cands.size() == 1);
        CHECK(cands[0].second == "NUM");
    }
    SUBCASE("empty f-structure yields no candidates") {
        Fragment bare = fig2;
        for (auto& [id, u] : bare.fstruct.units) u.pairs.clear();
        CHECK(discard_candidates(bare, false).empty());
    }
}

TEST_CASE("discard_op deletes pairs and guards protected ones") {
    Corpus c = fixtures::kim_corpus();
    const Representation& kim = c.entries[0].gold;
    Fragment fig4 = frontier_op(root_op(kim, kim.cstruct.root),
                                {fixtures::find_node(kim, "NP")});
    Fragment fig2 = root_op(kim, fixtures::find_node(kim, "NP"));

    auto cands4 = discard_candidates(fig4, true);
    Fragment gen = discard_op(fig4, {cands4[0]}, true);   // drop TENSE
    CHECK(gen.provenance == Provenance::Discard);
    CHECK(canonical_form(gen) ==
          "(S.1 NP*.2 (VP.1 eats.1)) 1->[(PRED 'eat<SUBJ>'#1)(SUBJ 2)] 2->[(NUM SG)]");

    auto cands2 = discard_candidates(fig2, true);
    Fragment gen2 = discard_op(fig2, {cands2[0]}, true);   // drop NUM
    CHECK(canonical_form(gen2) == "(NP.1 Kim.1) 1->[(PRED 'Kim'#1)]");

    UnitId outer = fig4.phi_of(fig4.cstruct.root);
    CHECK_THROWS_AS(discard_op(fig4, {{outer, "SUBJ"}}, true), Error);
    CHECK_THROWS_AS(discard_op(fig4, {}, true), Error);
}

TEST_CASE("discard generalizations subsume their sources") {
    Representation pp = pp_fixture();
    EnumerateOptions opts;
    opts.max_depth = 4;
    auto rf = enumerate_fragments(pp, opts);
    for (const auto& [canon, item] : rf.items) {
        const Fragment& f = item.fragment;
        auto cands = discard_candidates(f, false);
        if (cands.empty()) continue;
        Fragment g = discard_op(f, {cands[0]}, false);

        // combine the two stores under disjoint ids, then unify the outers
        FStore joint;
        UnitId offset = 1000;
        for (const auto& [id, u] : f.fstruct.units) joint.units[id] = u;
        for (const auto& [id, u] : g.fstruct.units) {
            FUnit copy = u;
            copy.id = id + offset;
            for (auto& [a, v] : copy.pairs)
                if (is_unitref(v)) v = UnitRef{std::get<UnitRef>(v).target + offset};
            joint.units[copy.id] = copy;
        }
        CHECK(unify_units(f.fstruct.outer, g.fstruct.outer + offset, joint).ok);
    }
}

TEST_CASE("enumeration matches the spec count on Kim eats") {
    Corpus c = fixtures::kim_corpus();
    EnumerateOptions opts;
    opts.max_depth = 4;
    auto ms = enumerate_fragments(c.entries[0].gold, opts);
    CHECK(ms.total() == 6);
    CHECK(ms.items.size() == 6);

    opts.max_depth = 1;
    auto shallow = enumerate_fragments(c.entries[0].gold, opts);
    CHECK(shallow.total() == 3);   // (S NP* VP*), (NP Kim), (VP eats)
    for (const auto& [canon, item] : shallow.items) {
        const CTree& t = item.fragment.cstruct;
        for (NodeId child : t.at(t.root).children) {
            NodeKind k = t.at(child).kind;
            CHECK(k != NodeKind::Internal);
        }
    }
}

TEST_CASE("enumeration agrees with the independent decomposition oracle") {
    for (const Representation& repr : {fixtures::kim_corpus().entries[0].gold, pp_fixture()}) {
        for (int depth : {1, 2, 3, 4}) {
            EnumerateOptions opts;
            opts.max_depth = depth;
            auto got = enumerate_fragments(repr, opts);
            auto want = oracle_rf_multiset(repr, depth);
            REQUIRE(got.items.size() == want.size());
            for (const auto& [canon, count] : want) {
                REQUIRE(got.items.count(canon) == 1);
                CHECK(got.items.at(canon).rf == count);
            }
        }
    }
}

TEST_CASE("fragment counts without discard equal the Tree-DOP subtree count") {
    for (const Representation& repr : {fixtures::kim_corpus().entries[0].gold, pp_fixture()}) {
        EnumerateOptions opts;
        opts.max_depth = 1000;   // no effective cap
        auto ms = enumerate_fragments(repr, opts);
        CHECK(ms.total() == treedop_total(repr.cstruct));
    }
}

TEST_CASE("every generated fragment satisfies the fragment invariants") {
    Representation pp = pp_fixture();
    EnumerateOptions opts;
    opts.max_depth = 4;
    opts.include_discard = true;
    auto ms = enumerate_fragments(pp, opts);
    CHECK(ms.items.size() > 50);
    for (const auto& [canon, item] : ms.items) {
        const Fragment& f = item.fragment;
        CHECK(check_uniqueness(f.fstruct).ok);
        // phi closure in both directions
        std::set<NodeId> nodes;
        for (const auto& [id, n] : f.cstruct.nodes) nodes.insert(id);
        std::set<UnitId> reach = accessible_units(f, nodes);
        for (const auto& [id, u] : f.fstruct.units) CHECK(reach.count(id) == 1);
        for (const auto& [n, u] : f.phi) CHECK(f.fstruct.has(u));
        // slots are phi-linked non-terminals
        for (const auto& [id, n] : f.cstruct.nodes)
            if (n.kind == NodeKind::FrontierSlot) CHECK(f.phi.count(id) == 1);
    }
}

TEST_CASE("root then frontier commutes with frontier then root") {
    for (const Representation& repr : {fixtures::kim_corpus().entries[0].gold, pp_fixture()}) {
        Fragment whole = root_op(repr, repr.cstruct.root);
        for (const auto& [rid, rnode] : repr.cstruct.nodes) {
            if (rnode.kind != NodeKind::Internal) continue;
            auto inside = repr.cstruct.subtree(rid);
            std::vector<NodeId> eligible;
            for (NodeId n : inside)
                if (n != rid && repr.cstruct.at(n).kind == NodeKind::Internal)
                    eligible.push_back(n);
            size_t subsets = size_t{1} << eligible.size();
            for (size_t mask = 0; mask < subsets; ++mask) {
                std::set<NodeId> frontier;
                for (size_t b = 0; b < eligible.size(); ++b)
                    if (mask & (size_t{1} << b)) frontier.insert(eligible[b]);
                auto cut = strict_descendants(repr.cstruct, frontier);
                bool dominated = false;
                for (NodeId n : frontier)
                    if (cut.count(n)) dominated = true;
                if (dominated) continue;

                Fragment root_first = frontier_op(root_op(repr, rid), frontier);
                Fragment frontier_first = root_op(frontier_op(whole, frontier), rid);
                CHECK(canonical_form(root_first) == canonical_form(frontier_first));
            }
        }
    }
}

TEST_CASE("discard enumeration multiplicity matches per-occurrence subsets") {
    Corpus c = fixtures::kim_corpus();
    EnumerateOptions opts;
    opts.max_depth = 4;
    opts.include_discard = true;
    opts.protect_pred = true;
    auto ms = enumerate_fragments(c.entries[0].gold, opts);

    // RF occurrences: 6. Deletable pairs per occurrence with PRED kept:
    // (S (NP Kim)(VP eats)): TENSE,NUM -> 3 subsets; (S NP* (VP eats)): 3;
    // (S (NP Kim) VP*): 3; (S NP* VP*): 3; (NP Kim): 1. In (VP eats) the
    // SUBJ value is no remaining node's phi image (the NP was erased), so
    // SUBJ,TENSE,NUM are all deletable -> 7.
    long discard_tokens = 0;
    for (const auto& [canon, item] : ms.items)
        discard_tokens += item.discard;
    CHECK(discard_tokens == 3 + 3 + 3 + 3 + 1 + 7);
    CHECK(ms.total() == 6 + discard_tokens);

    SUBCASE("the discard cap keeps smallest deletions first") {
        EnumerateOptions capped = opts;
        capped.discard_cap = 1;
        auto small = enumerate_fragments(c.entries[0].gold, capped);
        long capped_tokens = 0;
        for (const auto& [canon, item] : small.items)
            capped_tokens += item.discard;
        CHECK(capped_tokens == 6);   // one subset per RF occurrence
    }
}

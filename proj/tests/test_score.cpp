#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "lfgdop/score.hpp"

using namespace lfgdop;

namespace {

const char* kGoldText = R"(#id: 1
#sent: the man sees a dog with the telescope
#tree: (S.1 (NP.2 the.2 man.2) (VP.1 sees.1 (NP.3 a.3 dog.3) (PP.4 with.4 (NP.5 the.5 telescope.5))))
#fs:
1 -> [(SUBJ 2) (OBJ 3) (PMOD 4) (TENSE PRES) (PRED 'see<SUBJ,OBJ>')]
2 -> [(PRED 'man') (NUM SG) (DEF yes)]
3 -> [(PRED 'dog') (NUM SG) (DEF no)]
4 -> [(PRED 'with<OBJ>') (OBJ 5)]
5 -> [(PRED 'telescope') (NUM SG) (DEF yes)]

)";

// same tokens, NP attachment instead
const char* kOtherBracketing = R"(#id: 1
#sent: the man sees a dog with the telescope
#tree: (S.1 (NP.2 the.2 man.2) (VP.1 sees.1 (NP.3 (NP.3 a.3 dog.3) (PP.4 with.4 (NP.5 the.5 telescope.5)))))
#fs:
1 -> [(SUBJ 2) (OBJ 3) (TENSE PRES) (PRED 'see<SUBJ,OBJ>')]
2 -> [(PRED 'man') (NUM SG) (DEF yes)]
3 -> [(PRED 'dog') (NUM SG) (DEF no) (PMOD 4)]
4 -> [(PRED 'with<OBJ>') (OBJ 5)]
5 -> [(PRED 'telescope') (NUM SG) (DEF yes)]

)";

Representation gold() { return parse_corpus_file(kGoldText).entries[0].gold; }

Representation near_miss() {
    // telescope unit NUM flipped: tree-identical, f-structure differs
    Representation r = gold();
    for (auto& [id, u] : r.fstruct.units) {
        const SemForm* p = u.pred();
        if (p && p->predicate == "telescope")
            for (auto& [a, v] : u.pairs)
                if (a == "NUM") v = Atom{"PL"};
    }
    return r;
}

} // namespace

TEST_CASE("fstructure equality is structural and instance-blind") {
    Corpus c = fixtures::kim_corpus();
    const Representation& kim = c.entries[0].gold;
    Corpus c2 = fixtures::kim_corpus();   // re-parse: fresh semform instances
    const Representation& kim2 = c2.entries[0].gold;

    UnitId subj1 = kim.phi_of(fixtures::find_node(kim, "NP"));
    UnitId subj2 = kim2.phi_of(fixtures::find_node(kim2, "NP"));
    CHECK(fstructure_equal(subj1, kim.fstruct, subj2, kim2.fstruct));
    CHECK(fstructure_equal(kim.fstruct.outer, kim.fstruct, kim2.fstruct.outer, kim2.fstruct));

    Representation pl = kim2;
    for (auto& [id, u] : pl.fstruct.units)
        for (auto& [a, v] : u.pairs)
            if (a == "NUM") v = Atom{"PL"};
    CHECK_FALSE(fstructure_equal(kim.fstruct.outer, kim.fstruct, pl.fstruct.outer, pl.fstruct));

    Representation fewer = kim2;
    for (auto& [id, u] : fewer.fstruct.units) u.erase("NUM");
    CHECK_FALSE(
        fstructure_equal(kim.fstruct.outer, kim.fstruct, fewer.fstruct.outer, fewer.fstruct));
}

TEST_CASE("fstructure equality survives re-entrant structures") {
    FStore a;
    FUnit a1, a2;
    a1.id = 1;
    a1.set("SUBJ", UnitRef{2});
    a2.id = 2;
    a2.set("BACK", UnitRef{1});
    a.units[1] = a1;
    a.units[2] = a2;
    FStore b = a;
    CHECK(fstructure_equal(1, a, 1, b));
}

TEST_CASE("constituents exclude preterminal word nodes") {
    Corpus c = fixtures::kim_corpus();
    auto cs = constituents(c.entries[0].gold);
    REQUIRE(cs.size() == 1);   // NP and VP each dominate a single word
    CHECK(cs[0].label == "S");
    CHECK(cs[0].start == 0);
    CHECK(cs[0].end == 2);

    auto cs2 = constituents(gold());
    CHECK(cs2.size() == 6);   // S, NP, VP, NP, PP, NP (all multi-word)
}

TEST_CASE("identity scores perfectly in both modes") {
    Representation g = gold();
    SentenceScore full = score_lfg(g, g);
    CHECK(full.exact);
    CHECK(full.correct == full.proposed);
    CHECK(full.proposed == full.gold);
    SentenceScore tree = score_tree(g, g);
    CHECK(tree.exact);
    CHECK(tree.correct == tree.gold);
}

TEST_CASE("a single NUM flip penalizes the phi-aware score only") {
    Representation g = gold();
    Representation p = near_miss();

    SentenceScore tree = score_tree(p, g);
    CHECK(tree.exact);
    CHECK(tree.correct == 6);

    // the flipped unit sits inside the phi images of S, VP, PP and the
    // innermost NP; only the two untouched NPs survive (hand inspection)
    SentenceScore full = score_lfg(p, g);
    CHECK_FALSE(full.exact);
    CHECK(full.proposed == 6);
    CHECK(full.gold == 6);
    CHECK(full.correct == 2);
}

TEST_CASE("different bracketing keeps only matching spans") {
    Representation g = gold();
    Representation p = parse_corpus_file(kOtherBracketing).entries[0].gold;

    // the NP-attachment tree has one extra constituent (the complex
    // object); every gold span is present, so tree recall is perfect
    SentenceScore tree = score_tree(p, g);
    CHECK(tree.proposed == 7);
    CHECK(tree.correct == 6);

    // phi-aware: PMOD moved between units, so S, VP and the object NP
    // all carry different f-structure; man, with and telescope survive
    SentenceScore full = score_lfg(p, g);
    CHECK(full.correct == 3);

    // token mismatch is an error
    Corpus kim = fixtures::kim_corpus();
    CHECK_THROWS_AS(score_lfg(kim.entries[0].gold, g), Error);
}

TEST_CASE("flat proposed tree against the articulated gold") {
    Representation g = gold();
    Representation flat;
    CNode root;
    root.id = 0;
    root.label = "S";
    root.kind = NodeKind::Internal;
    NodeId next = 1;
    for (const std::string& w : g.cstruct.terminal_yield()) {
        CNode t;
        t.id = next;
        t.label = w;
        t.kind = NodeKind::Terminal;
        flat.cstruct.nodes[next] = t;
        root.children.push_back(next);
        ++next;
    }
    flat.cstruct.nodes[0] = root;
    flat.cstruct.root = 0;
    FUnit u;
    u.id = 1;
    flat.fstruct.units[1] = u;
    flat.fstruct.outer = 1;
    for (const auto& [id, n] : flat.cstruct.nodes) flat.phi[id] = 1;

    SentenceScore tree = score_tree(flat, g);
    CHECK(tree.proposed == 1);
    CHECK(tree.correct == 1);   // the root matches: precision 1, recall 1/6
    CHECK(tree.gold == 6);
    CHECK_FALSE(tree.exact);
}

TEST_CASE("exact match modes split as specified") {
    Representation g = gold();
    Representation p = near_miss();
    CHECK(exact_match(g, g, EvalMode::Full));
    CHECK_FALSE(exact_match(p, g, EvalMode::Full));
    CHECK(exact_match(p, g, EvalMode::TreeOnly));

    Representation other = parse_corpus_file(kOtherBracketing).entries[0].gold;
    CHECK_FALSE(exact_match(other, g, EvalMode::Full));
    CHECK_FALSE(exact_match(other, g, EvalMode::TreeOnly));
}

TEST_CASE("phi-aware correct count never exceeds the tree-only count") {
    Representation g = gold();
    for (const Representation& p : {gold(), near_miss(),
                                    parse_corpus_file(kOtherBracketing).entries[0].gold}) {
        CHECK(score_lfg(p, g).correct <= score_tree(p, g).correct);
    }
}

TEST_CASE("full exact match implies perfect precision and recall") {
    Representation g = gold();
    SentenceScore s = score_lfg(gold(), g);
    REQUIRE(s.exact);
    CHECK(s.correct == s.proposed);
    CHECK(s.correct == s.gold);
}

TEST_CASE("precision and recall swap when proposed and gold swap") {
    Representation g = gold();
    Representation p = parse_corpus_file(kOtherBracketing).entries[0].gold;
    SentenceScore ab = score_lfg(p, g);
    SentenceScore ba = score_lfg(g, p);
    CHECK(ab.correct == ba.correct);
    CHECK(ab.proposed == ba.gold);
    CHECK(ab.gold == ba.proposed);
}

TEST_CASE("unit-id renaming never changes scores") {
    Representation g = gold();
    Representation p = gold();
    std::map<UnitId, UnitId> perm;
    for (const auto& [id, u] : p.fstruct.units) perm[id] = id + 50;
    Representation renamed;
    renamed.cstruct = p.cstruct;
    for (const auto& [id, u] : p.fstruct.units) {
        FUnit nu = u;
        nu.id = perm[id];
        for (auto& [a, v] : nu.pairs)
            if (is_unitref(v)) v = UnitRef{perm[std::get<UnitRef>(v).target]};
        renamed.fstruct.units[nu.id] = nu;
    }
    renamed.fstruct.outer = perm[p.fstruct.outer];
    for (const auto& [n, u] : p.phi) renamed.phi[n] = perm[u];

    SentenceScore s = score_lfg(renamed, g);
    CHECK(s.exact);
    CHECK(s.correct == s.gold);
}

TEST_CASE("report aggregates and CSV shape") {
    ScoreReport r;
    r.sentences.push_back({1, true, 5, 5, 5});
    r.sentences.push_back({2, false, 2, 4, 5});
    CHECK(r.precision() == doctest::Approx(7.0 / 9.0));
    CHECK(r.recall() == doctest::Approx(7.0 / 10.0));
    CHECK(r.exact_match_rate() == doctest::Approx(0.5));
    std::string csv = r.to_csv();
    CHECK(csv.find("sentence,exact,correct,proposed,gold\n") == 0);
    CHECK(csv.find("1,1,5,5,5\n") != std::string::npos);
    CHECK(csv.find("2,0,2,4,5\n") != std::string::npos);
}

#ifndef LFGDOP_DERIVE_HPP
#define LFGDOP_DERIVE_HPP

// Chart decoding: leftmost composition with on-the-fly competition
// sets (category match + Uniqueness + Coherence), Monte Carlo sampling
// with a probability-of-error stop rule, Viterbi n-best extraction and
// the exhaustive oracle distribution.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lfgdop/chart.hpp"

namespace lfgdop {

// Logical composition attempts, machine-independent: every candidate
// tried while forming a competition set counts, whether or not the
// outcome was memoized.
struct ComposeStats {
    long compose_calls = 0;
};

enum class Validity { Valid, Incomplete, Failed };

struct StepChoice {
    ItemKey item;            // the first step's item is the root item
    int app_index = 0;
    int member_index = 0;
};

struct Derivation {
    std::vector<StepChoice> steps;
    std::vector<const Fragment*> fragments;
    double log_prob = 0.0;            // Eq. (2) CPs, or context-free sum for raw n-best
    Validity validity = Validity::Failed;
    std::string failure;
    Representation analysis;          // set when composition ran to completion
    std::string analysis_canonical;
};

struct DecodeOptions {
    ValidityOptions validity;
    std::string initial_category = "S";
};

namespace detail {

struct PendingSlot {
    NodeId node;
    ItemKey item;
};

struct DecodeState {
    Representation analysis;
    std::vector<PendingSlot> stack;   // back() is the leftmost open slot
    NodeId next_node = 0;
    UnitId next_unit = 1;
    int steps = 0;
};

struct Instantiated {
    NodeId root;
    UnitId root_unit;
    std::vector<NodeId> slots;        // left to right
};

// Copy a fragment into the growing analysis under fresh node/unit ids.
inline Instantiated instantiate(DecodeState& st, const Fragment& f) {
    std::map<NodeId, NodeId> node_map;
    std::map<UnitId, UnitId> unit_map;
    for (const auto& [id, node] : f.cstruct.nodes) node_map[id] = st.next_node++;
    for (const auto& [id, unit] : f.fstruct.units) unit_map[id] = st.next_unit++;

    for (const auto& [id, node] : f.cstruct.nodes) {
        CNode copy = node;
        copy.id = node_map[id];
        for (NodeId& c : copy.children) c = node_map[c];
        st.analysis.cstruct.nodes[copy.id] = std::move(copy);
    }
    for (const auto& [id, unit] : f.fstruct.units) {
        FUnit copy = unit;
        copy.id = unit_map[id];
        for (auto& [attr, val] : copy.pairs)
            if (is_unitref(val)) val = FValue{UnitRef{unit_map[std::get<UnitRef>(val).target]}};
        st.analysis.fstruct.units[copy.id] = std::move(copy);
    }
    for (const auto& [n, u] : f.phi) st.analysis.phi[node_map[n]] = unit_map[u];

    Instantiated out;
    out.root = node_map.at(f.cstruct.root);
    out.root_unit = st.analysis.phi.count(out.root) ? st.analysis.phi.at(out.root) : -1;
    for (NodeId leaf : f.cstruct.leaves())
        if (f.cstruct.at(leaf).kind == NodeKind::FrontierSlot)
            out.slots.push_back(node_map.at(leaf));
    return out;
}

struct ComposeOutcome {
    bool ok = false;
    std::string failure;              // condition name on failure
    std::vector<NodeId> new_slots;    // slot nodes of the grafted fragment
};

// Leftmost substitution followed by unification of the slot unit with
// the fragment's root unit; Uniqueness and Coherence re-checked.
inline ComposeOutcome compose_step(DecodeState& st, NodeId slot_node, const Fragment& f,
                                   const DecodeOptions& opts) {
    ComposeOutcome out;
    CNode& slot = st.analysis.cstruct.at(slot_node);
    if (slot.kind != NodeKind::FrontierSlot) {
        out.failure = "slot";
        return out;
    }
    if (slot.label != f.root_category()) {
        out.failure = "CategoryMatch";
        return out;
    }

    Instantiated inst = instantiate(st, f);
    const CNode& froot = st.analysis.cstruct.at(inst.root);

    UnitId slot_unit = st.analysis.phi.count(slot_node) ? st.analysis.phi.at(slot_node) : -1;
    slot.kind = NodeKind::Internal;
    slot.children = froot.children;
    st.analysis.cstruct.nodes.erase(inst.root);
    st.analysis.phi.erase(inst.root);

    if (slot_unit >= 0 && inst.root_unit >= 0) {
        UnifyResult ur = unify_units(slot_unit, inst.root_unit, st.analysis.fstruct);
        if (!ur.ok) {
            out.failure = "Uniqueness";
            return out;
        }
        st.analysis.fstruct = std::move(ur.store);
        for (auto& [n, u] : st.analysis.phi) u = ur.remap.at(u);
    } else if (inst.root_unit >= 0) {
        st.analysis.phi[slot_node] = inst.root_unit;
    }

    if (Verdict v = check_coherence(st.analysis.fstruct, opts.validity.governable); !v) {
        out.failure = "Coherence";
        return out;
    }
    out.ok = true;
    out.new_slots = std::move(inst.slots);
    return out;
}

inline void seed_state(DecodeState& st, const Fragment& f) {
    Instantiated inst = instantiate(st, f);
    st.analysis.cstruct.root = inst.root;
    st.analysis.fstruct.outer = inst.root_unit;
}

struct Candidate {
    int app_index = 0;
    int member_index = 0;
    const ChartApp* app = nullptr;
    const BankEntry* member = nullptr;
};

// One evaluated competition set: the admissible (application, member)
// pairs with cumulative weights for sampling.
struct CachedCS {
    std::vector<Candidate> admissible;
    std::vector<double> cum;
    double total = 0.0;
    long considered = 0;   // candidates tried, for the compose counter
};

// Admissibility depends only on the unit subgraph reachable from the
// slot plus the member fragment, so whole competition sets are memoized
// per (item, slot signature).
struct CompetitionCache {
    std::map<std::pair<ItemKey, std::string>, CachedCS> memo;
    long hits = 0;
    long misses = 0;
};

inline std::string slot_signature(const DecodeState& st, bool is_seed) {
    if (is_seed) return {};
    UnitId slot_unit = st.analysis.phi.count(st.stack.back().node)
                           ? st.analysis.phi.at(st.stack.back().node)
                           : -1;
    return store_signature(st.analysis.fstruct, {slot_unit});
}

inline CachedCS evaluate_competition(const DecodeState& st, const Chart& chart,
                                     const ItemKey& item, bool is_seed,
                                     const DecodeOptions& opts) {
    CachedCS cs;
    const auto& apps = chart.apps(item);
    for (int ai = 0; ai < static_cast<int>(apps.size()); ++ai) {
        const ChartApp& app = apps[ai];
        for (int mi = 0; mi < static_cast<int>(app.shape->members.size()); ++mi) {
            const BankEntry* member = app.shape->members[mi];
            ++cs.considered;
            bool ok;
            if (is_seed) {
                ok = true;   // fragments are internally well-formed
            } else {
                DecodeState trial;
                trial.analysis = st.analysis;
                trial.next_node = st.next_node;
                trial.next_unit = st.next_unit;
                ok = compose_step(trial, st.stack.back().node, member->fragment, opts).ok;
            }
            if (!ok) continue;
            cs.admissible.push_back({ai, mi, &app, member});
            cs.total += member->p;
            cs.cum.push_back(cs.total);
        }
    }
    return cs;
}

inline const CachedCS& competition_set(const DecodeState& st, const Chart& chart,
                                       const ItemKey& item, bool is_seed,
                                       const DecodeOptions& opts, ComposeStats* stats,
                                       CompetitionCache& cache) {
    std::string sig = slot_signature(st, is_seed);
    auto key = std::make_pair(item, std::move(sig));
    auto it = cache.memo.find(key);
    if (it == cache.memo.end()) {
        it = cache.memo.emplace(key, evaluate_competition(st, chart, item, is_seed, opts)).first;
        ++cache.misses;
    } else {
        ++cache.hits;
    }
    if (stats) stats->compose_calls += it->second.considered;
    return it->second;
}

// CP(candidate | CS) under Eq. (3).
inline double candidate_cp(const CachedCS& cs, size_t index) {
    return cs.admissible[index].member->p / cs.total;
}

inline std::optional<size_t> find_candidate(const CachedCS& cs, int app_index, int member_index) {
    for (size_t i = 0; i < cs.admissible.size(); ++i)
        if (cs.admissible[i].app_index == app_index &&
            cs.admissible[i].member_index == member_index)
            return i;
    return std::nullopt;
}

// Commit a candidate: graft, unify, push the new slots leftmost-first.
// On failure the state is spent and must be discarded by the caller.
inline ComposeOutcome apply_candidate(DecodeState& st, const Candidate& cand, bool is_seed,
                                      const DecodeOptions& opts, ComposeStats* stats) {
    ComposeOutcome oc;
    std::vector<NodeId> slot_nodes;
    if (is_seed) {
        seed_state(st, cand.member->fragment);
        for (NodeId leaf : st.analysis.cstruct.leaves())
            if (st.analysis.cstruct.at(leaf).kind == NodeKind::FrontierSlot)
                slot_nodes.push_back(leaf);
        oc.ok = true;
    } else {
        if (stats) ++stats->compose_calls;
        PendingSlot slot = st.stack.back();
        st.stack.pop_back();
        oc = compose_step(st, slot.node, cand.member->fragment, opts);
        if (!oc.ok) return oc;
        slot_nodes = std::move(oc.new_slots);
    }
    if (slot_nodes.size() != cand.app->children.size())
        throw Error(ErrorKind::Internal, "slot/child arity mismatch");
    for (size_t i = slot_nodes.size(); i-- > 0;)
        st.stack.push_back({slot_nodes[i], cand.app->children[i]});
    ++st.steps;
    return oc;
}

inline void finalize_derivation(Derivation& d, DecodeState& st, const DecodeOptions& opts) {
    d.analysis = std::move(st.analysis);
    if (Verdict v = check_completeness(d.analysis.fstruct, opts.validity.governable,
                                       opts.validity.strict_completeness);
        !v) {
        d.validity = Validity::Incomplete;
        d.failure = "Completeness:" + v.attribute;
        return;
    }
    if (Verdict v = check_nonbranching_dominance(d.analysis.cstruct); !v) {
        d.validity = Validity::Failed;
        d.failure = "NonbranchingDominance";
        return;
    }
    d.validity = Validity::Valid;
    d.analysis_canonical = canonical_form(d.analysis);
}

inline double uniform01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

} // namespace detail

// ---------------------------------------------------------------------
// Sampling (top-down, leftmost).

struct SamplerState {
    std::map<std::string, long> tallies;   // analysis canonical -> count
    long samples_drawn = 0;
    long rejections = 0;                   // dead ends + incomplete + invalid
    std::uint64_t seed = 0;

    std::string serialize() const {
        std::string out = "seed=" + std::to_string(seed) +
                          " samples=" + std::to_string(samples_drawn) +
                          " rejections=" + std::to_string(rejections) + "\n";
        for (const auto& [canon, count] : tallies)
            out += std::to_string(count) + "\t" + canon + "\n";
        return out;
    }
};

template <typename Rng>
inline Derivation sample_derivation(const Chart& chart, const FragmentBank& bank, Rng& rng,
                                    const DecodeOptions& opts, ComposeStats* stats,
                                    detail::CompetitionCache& cache) {
    (void)bank;
    Derivation d;
    detail::DecodeState st;
    ItemKey item = chart.root_key();
    bool is_seed = true;
    while (true) {
        const detail::CachedCS& cs =
            detail::competition_set(st, chart, item, is_seed, opts, stats, cache);
        if (cs.admissible.empty()) {
            d.validity = Validity::Failed;
            d.failure = is_seed ? "NoParse" : "DeadEnd";
            return d;
        }
        double u = detail::uniform01(rng()) * cs.total;
        size_t pick = std::lower_bound(cs.cum.begin(), cs.cum.end(), u) - cs.cum.begin();
        if (pick >= cs.admissible.size()) pick = cs.admissible.size() - 1;
        const detail::Candidate& chosen = cs.admissible[pick];
        d.log_prob += std::log(detail::candidate_cp(cs, pick));
        d.steps.push_back({item, chosen.app_index, chosen.member_index});
        d.fragments.push_back(&chosen.member->fragment);
        if (!detail::apply_candidate(st, chosen, is_seed, opts, stats).ok)
            throw Error(ErrorKind::Internal, "admissible candidate failed to compose");
        is_seed = false;
        if (st.stack.empty()) break;
        item = st.stack.back().item;
    }
    detail::finalize_derivation(d, st, opts);
    return d;
}

template <typename Rng>
inline Derivation sample_derivation(const Chart& chart, const FragmentBank& bank, Rng& rng,
                                    const DecodeOptions& opts = {},
                                    ComposeStats* stats = nullptr) {
    detail::CompetitionCache cache;
    return sample_derivation(chart, bank, rng, opts, stats, cache);
}

// Probability that the currently most frequent analysis is not the most
// probable one: normal approximation on the top-two proportion gap.
inline double mc_error_probability(const std::map<std::string, long>& tallies, long m) {
    if (m <= 0) return 1.0;
    long best = 0, second = 0;
    for (const auto& [k, c] : tallies) {
        if (c >= best) { second = best; best = c; }
        else if (c > second) second = c;
    }
    double p1 = static_cast<double>(best) / m;
    double p2 = static_cast<double>(second) / m;
    double var = (p1 + p2 - (p1 - p2) * (p1 - p2)) / m;
    if (var <= 0.0) return p1 > p2 ? 0.0 : 1.0;
    double z = (p1 - p2) / std::sqrt(var);
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

struct MonteCarloOptions {
    double error_threshold = 0.05;   // 0 disables early stopping
    long max_samples = 10000;
    long batch = 100;
    std::uint64_t seed = 1;
};

struct MonteCarloResult {
    Representation analysis;
    std::string analysis_canonical;
    SamplerState state;
    bool found = false;
};

inline MonteCarloResult monte_carlo_parse(const Chart& chart, const FragmentBank& bank,
                                          const MonteCarloOptions& mc = {},
                                          const DecodeOptions& opts = {},
                                          ComposeStats* stats = nullptr) {
    MonteCarloResult out;
    out.state.seed = mc.seed;
    if (!chart.has_root()) throw Error(ErrorKind::NoParse, "no chart parse");

    std::mt19937_64 rng(mc.seed);
    detail::CompetitionCache cache;
    std::map<std::string, Representation> witnesses;
    long valid = 0;
    while (out.state.samples_drawn < mc.max_samples) {
        long todo = std::min(mc.batch, mc.max_samples - out.state.samples_drawn);
        for (long i = 0; i < todo; ++i) {
            Derivation d = sample_derivation(chart, bank, rng, opts, stats, cache);
            ++out.state.samples_drawn;
            if (d.validity == Validity::Valid) {
                ++valid;
                ++out.state.tallies[d.analysis_canonical];
                witnesses.emplace(d.analysis_canonical, std::move(d.analysis));
            } else {
                ++out.state.rejections;
            }
        }
        if (mc.error_threshold > 0.0 && valid > 0 &&
            mc_error_probability(out.state.tallies, valid) < mc.error_threshold)
            break;
    }
    if (valid == 0) throw Error(ErrorKind::NoParse, "no valid derivation sampled");

    long best = -1;
    for (const auto& [canon, count] : out.state.tallies)
        if (count > best) { best = count; out.analysis_canonical = canon; }
    out.analysis = witnesses.at(out.analysis_canonical);
    out.found = true;
    return out;
}

// ---------------------------------------------------------------------
// Viterbi n-best over context-free scores (sum of member log P); exact
// Eq. (2) rescoring happens during replay.

namespace detail {

struct KBestEntry {
    double score = 0.0;
    int app_index = -1;
    int member_index = 0;
    std::vector<int> child_ranks;
};

struct KBestItem {
    std::vector<KBestEntry> sorted;
    std::set<std::vector<int>> seen;   // (app, member, child ranks...) signatures
    bool initialized = false;
    bool in_progress = false;

    struct HeapCmp {
        bool operator()(const std::pair<double, std::vector<int>>& a,
                        const std::pair<double, std::vector<int>>& b) const {
            if (a.first != b.first) return a.first < b.first;   // max-heap on score
            return a.second > b.second;                         // then smallest signature
        }
    };
    std::priority_queue<std::pair<double, std::vector<int>>,
                        std::vector<std::pair<double, std::vector<int>>>, HeapCmp>
        frontier;
};

class KBestExtractor {
public:
    explicit KBestExtractor(const Chart& chart) : chart_(chart) {}

    // Entry `rank` (0-based) of the item's ranked list, or nullptr.
    const KBestEntry* get(const ItemKey& key, int rank) {
        KBestItem& item = items_[key];
        if (item.in_progress) return nullptr;   // unary cycle guard
        if (!item.initialized) init(key, item);
        while (static_cast<int>(item.sorted.size()) <= rank && !item.frontier.empty())
            pop_next(key, item);
        return rank < static_cast<int>(item.sorted.size()) ? &item.sorted[rank] : nullptr;
    }

private:
    // signature: [app, member, child ranks...]
    std::optional<double> score_of(const ItemKey& key, const std::vector<int>& sig) {
        const ChartApp& app = chart_.apps(key)[sig[0]];
        double s = app.shape->members[sig[1]]->log_p;
        for (size_t c = 0; c < app.children.size(); ++c) {
            const KBestEntry* e = get(app.children[c], sig[2 + c]);
            if (!e) return std::nullopt;
            s += e->score;
        }
        return s;
    }

    void push(const ItemKey& key, KBestItem& item, std::vector<int> sig) {
        if (!item.seen.insert(sig).second) return;
        item.in_progress = true;
        auto s = score_of(key, sig);
        item.in_progress = false;
        if (s) item.frontier.emplace(*s, std::move(sig));
    }

    void init(const ItemKey& key, KBestItem& item) {
        item.initialized = true;
        const auto& apps = chart_.apps(key);
        for (int ai = 0; ai < static_cast<int>(apps.size()); ++ai) {
            std::vector<int> sig{ai, 0};
            sig.resize(2 + apps[ai].children.size(), 0);
            push(key, item, std::move(sig));
        }
    }

    void pop_next(const ItemKey& key, KBestItem& item) {
        auto [score, sig] = item.frontier.top();
        item.frontier.pop();
        KBestEntry e;
        e.score = score;
        e.app_index = sig[0];
        e.member_index = sig[1];
        e.child_ranks.assign(sig.begin() + 2, sig.end());
        item.sorted.push_back(std::move(e));

        const ChartApp& app = chart_.apps(key)[sig[0]];
        if (sig[1] + 1 < static_cast<int>(app.shape->members.size())) {
            auto next = sig;
            ++next[1];
            push(key, item, std::move(next));
        }
        for (size_t c = 0; c < app.children.size(); ++c) {
            auto next = sig;
            ++next[2 + c];
            push(key, item, std::move(next));
        }
    }

    const Chart& chart_;
    std::map<ItemKey, KBestItem> items_;
};

inline void flatten_derivation(KBestExtractor& kb, const Chart& chart, const ItemKey& key,
                               const KBestEntry& entry, Derivation& d) {
    const ChartApp& app = chart.apps(key)[entry.app_index];
    d.steps.push_back({key, entry.app_index, entry.member_index});
    d.fragments.push_back(&app.shape->members[entry.member_index]->fragment);
    for (size_t c = 0; c < app.children.size(); ++c) {
        const KBestEntry* ce = kb.get(app.children[c], entry.child_ranks[c]);
        flatten_derivation(kb, chart, app.children[c], *ce, d);
    }
}

} // namespace detail

// The n highest-scoring derivations under context-free fragment scores;
// ties broken deterministically by the bank's canonical member order.
inline std::vector<Derivation> viterbi_nbest(const Chart& chart, const FragmentBank& bank, long n) {
    (void)bank;
    std::vector<Derivation> out;
    if (!chart.has_root()) return out;
    detail::KBestExtractor kb(chart);
    for (long i = 0; i < n; ++i) {
        const detail::KBestEntry* e = kb.get(chart.root_key(), static_cast<int>(i));
        if (!e) break;
        Derivation d;
        d.log_prob = e->score;
        detail::flatten_derivation(kb, chart, chart.root_key(), *e, d);
        out.push_back(std::move(d));
    }
    return out;
}

// Replay a step sequence through composition; fills validity, analysis
// and (optionally) the exact Eq. (2) probability.
inline Derivation replay_derivation(const Derivation& toreplay, const Chart& chart,
                                    const FragmentBank& bank, bool rescore,
                                    const DecodeOptions& opts, ComposeStats* stats,
                                    detail::CompetitionCache& cache) {
    (void)bank;
    Derivation d = toreplay;
    d.log_prob = 0.0;
    detail::DecodeState st;
    for (size_t si = 0; si < d.steps.size(); ++si) {
        const StepChoice& step = d.steps[si];
        bool is_seed = si == 0;
        const ChartApp& app = chart.apps(step.item)[step.app_index];
        detail::Candidate cand{step.app_index, step.member_index, &app,
                               app.shape->members[step.member_index]};
        if (rescore) {
            // exact Eq. (2): CP of the chosen member within the on-the-fly
            // competition set; absence means the composition would fail
            const detail::CachedCS& cs =
                detail::competition_set(st, chart, step.item, is_seed, opts, stats, cache);
            auto idx = detail::find_candidate(cs, step.app_index, step.member_index);
            if (!idx) {
                d.validity = Validity::Failed;
                d.failure = "Uniqueness";
                return d;
            }
            d.log_prob += std::log(detail::candidate_cp(cs, *idx));
        } else {
            d.log_prob += cand.member->log_p;
            if (!is_seed && stats) ++stats->compose_calls;
        }
        detail::ComposeOutcome oc =
            detail::apply_candidate(st, cand, is_seed, opts, rescore ? stats : nullptr);
        if (!oc.ok) {
            // the chart only checked categories; unification can refuse
            d.validity = Validity::Failed;
            d.failure = oc.failure;
            return d;
        }
    }
    if (!st.stack.empty()) {
        d.validity = Validity::Failed;
        d.failure = "IncompleteReplay";
        return d;
    }
    detail::finalize_derivation(d, st, opts);
    return d;
}

struct ViterbiResult {
    Representation analysis;
    std::string analysis_canonical;
    double log_prob = -std::numeric_limits<double>::infinity();
    long derivations_extracted = 0;
    long derivations_valid = 0;
    std::map<std::string, double> group_log_mass;
    std::map<std::string, Representation> witnesses;
    bool found = false;
};

inline double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Extract n best, replay for validity, group valid derivations by the
// analysis they produce, sum per group, return the argmax.
inline ViterbiResult viterbi_parse(const Chart& chart, const FragmentBank& bank, long n,
                                   bool rescore = false, const DecodeOptions& opts = {},
                                   ComposeStats* stats = nullptr) {
    ViterbiResult out;
    detail::CompetitionCache cache;
    std::vector<Derivation> best = viterbi_nbest(chart, bank, n);
    out.derivations_extracted = static_cast<long>(best.size());
    for (const Derivation& cand : best) {
        Derivation d = replay_derivation(cand, chart, bank, rescore, opts, stats, cache);
        if (d.validity != Validity::Valid) continue;
        ++out.derivations_valid;
        auto it = out.group_log_mass.find(d.analysis_canonical);
        if (it == out.group_log_mass.end()) {
            out.group_log_mass.emplace(d.analysis_canonical, d.log_prob);
            out.witnesses.emplace(d.analysis_canonical, std::move(d.analysis));
        } else {
            it->second = log_sum_exp(it->second, d.log_prob);
        }
    }
    if (out.group_log_mass.empty())
        throw Error(ErrorKind::NoParse, "no valid derivation among the n best");
    for (const auto& [canon, mass] : out.group_log_mass) {
        if (mass > out.log_prob) {
            out.log_prob = mass;
            out.analysis_canonical = canon;
        }
    }
    out.analysis = out.witnesses.at(out.analysis_canonical);
    out.found = true;
    return out;
}

// ---------------------------------------------------------------------
// Exhaustive oracle: every top-down leftmost derivation with exact
// competition probabilities (Eqs. 1-3), incomplete derivations dropped.

struct OracleDistribution {
    std::map<std::string, double> analysis_log_p;    // Eq. (1) per analysis
    std::map<std::string, Representation> analyses;
    double valid_log_mass = -std::numeric_limits<double>::infinity();
    long derivations_total = 0;
    long derivations_valid = 0;
    long dead_ends = 0;
    long incomplete = 0;

    std::string argmax() const {
        std::string best;
        double best_mass = -std::numeric_limits<double>::infinity();
        for (const auto& [canon, mass] : analysis_log_p)
            if (mass > best_mass) { best_mass = mass; best = canon; }
        return best;
    }
};

inline OracleDistribution brute_force_parse(const Chart& chart, const FragmentBank& bank,
                                            long guard = 1000000, const DecodeOptions& opts = {},
                                            ComposeStats* stats = nullptr) {
    if (!chart.has_root()) throw Error(ErrorKind::NoParse, "no chart parse");
    long bound = count_derivations(chart, guard);
    if (bound >= guard)
        throw Error(ErrorKind::Data, "oracle-too-large: derivation count reaches " +
                                         std::to_string(bound));

    OracleDistribution out;
    detail::CompetitionCache cache;

    struct Walker {
        const Chart& chart;
        const DecodeOptions& opts;
        ComposeStats* stats;
        detail::CompetitionCache& cache;
        OracleDistribution& out;

        void expand(const detail::DecodeState& st, double log_p, bool is_seed) {
            ItemKey item = is_seed ? chart.root_key() : st.stack.back().item;
            const detail::CachedCS& cs =
                detail::competition_set(st, chart, item, is_seed, opts, stats, cache);
            if (cs.admissible.empty()) {
                ++out.dead_ends;
                return;
            }
            size_t n = cs.admissible.size();
            for (size_t i = 0; i < n; ++i) {
                detail::DecodeState next = st;
                double cp = detail::candidate_cp(cs, i);
                if (!detail::apply_candidate(next, cs.admissible[i], is_seed, opts, stats).ok)
                    throw Error(ErrorKind::Internal, "oracle: admissible candidate failed");
                if (next.stack.empty()) {
                    ++out.derivations_total;
                    Derivation d;
                    detail::finalize_derivation(d, next, opts);
                    if (d.validity == Validity::Valid) {
                        ++out.derivations_valid;
                        double lp = log_p + std::log(cp);
                        auto it = out.analysis_log_p.find(d.analysis_canonical);
                        if (it == out.analysis_log_p.end()) {
                            out.analysis_log_p.emplace(d.analysis_canonical, lp);
                            out.analyses.emplace(d.analysis_canonical, std::move(d.analysis));
                        } else {
                            it->second = log_sum_exp(it->second, lp);
                        }
                        out.valid_log_mass = log_sum_exp(out.valid_log_mass, lp);
                    } else {
                        ++out.incomplete;
                    }
                } else {
                    expand(next, log_p + std::log(cp), false);
                }
            }
        }
    } walker{chart, opts, stats, cache, out};

    detail::DecodeState st;
    walker.expand(st, 0.0, true);
    return out;
}

} // namespace lfgdop

#endif

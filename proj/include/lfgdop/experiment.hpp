#ifndef LFGDOP_EXPERIMENT_HPP
#define LFGDOP_EXPERIMENT_HPP

// Experiment orchestration: repeated train/test splits, fragment
// extraction, bank building, parsing with the configured search and
// scoring, averaged over splits. Estimator/discard/depth/search axes
// may be swept in one run; outputs are deterministic CSV plus a text
// report with timings.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lfgdop/corpus.hpp"
#include "lfgdop/derive.hpp"
#include "lfgdop/score.hpp"

namespace lfgdop {

enum class SearchKind { MonteCarlo, Viterbi, Brute };

inline const char* search_name(SearchKind s) {
    switch (s) {
    case SearchKind::MonteCarlo: return "mc";
    case SearchKind::Viterbi: return "viterbi";
    default: return "brute";
    }
}

struct ExperimentConfig {
    std::string corpus_path;
    double ratio = 0.9;
    int n_splits = 10;
    std::uint64_t seed = 1;

    std::vector<int> max_depths = {4};
    std::vector<Estimator> estimators = {Estimator::DiscountedRf};
    std::vector<bool> discard_options = {true};
    bool protect_pred = false;
    long discard_cap = -1;

    std::vector<SearchKind> searches = {SearchKind::Viterbi};
    std::vector<long> derivations = {0};   // per-search budget; 0 = defaults below
    long n_best = 100;
    long max_samples = 10000;
    double error_threshold = 0.05;
    long batch = 100;
    bool rescore = true;
    long oracle_guard = 1000000;

    std::vector<bool> tree_dop_options = {false};
    EvalMode eval_mode = EvalMode::Full;
    std::string initial_category = "S";
    GovernableFunctions governable = GovernableFunctions::defaults();
    int jobs = 1;
    std::string out_dir;
};

struct VariantKey {
    Estimator estimator = Estimator::DiscountedRf;
    bool discard = true;
    int max_depth = 4;
    SearchKind search = SearchKind::Viterbi;
    long derivations = 0;
    bool tree_dop = false;

    std::string label() const {
        std::string s = std::string(estimator_name(estimator)) + "," +
                        (discard ? "+discard" : "-discard") + ",depth<=" +
                        std::to_string(max_depth) + "," + search_name(search);
        if (derivations > 0) s += "@" + std::to_string(derivations);
        if (tree_dop) s += ",treedop";
        return s;
    }
};

struct SentenceOutcome {
    int sentence = 0;
    bool parsed = false;
    SentenceScore score;
    long compose_calls = 0;
    std::string analysis_canonical;
    std::string failure;
};

struct SplitOutcome {
    VariantKey variant;
    int split = 0;
    std::vector<SentenceOutcome> sentences;
    long failures = 0;
    long compose_calls = 0;
    double wall_ms = 0.0;

    ScoreReport report() const {
        ScoreReport r;
        for (const auto& s : sentences) r.sentences.push_back(s.score);
        return r;
    }
};

struct VariantSummary {
    VariantKey variant;
    double exact = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double failures = 0.0;
    double compose_calls = 0.0;
    double wall_ms = 0.0;
};

struct ExperimentResult {
    std::vector<SplitOutcome> splits;

    std::vector<VariantSummary> summaries() const {
        std::vector<VariantSummary> out;
        for (const auto& sp : splits) {
            VariantSummary* s = nullptr;
            for (auto& v : out)
                if (v.variant.label() == sp.variant.label()) s = &v;
            if (!s) {
                out.push_back(VariantSummary{sp.variant, 0, 0, 0, 0, 0, 0});
                s = &out.back();
            }
        }
        for (auto& v : out) {
            int n = 0;
            for (const auto& sp : splits) {
                if (sp.variant.label() != v.variant.label()) continue;
                ScoreReport r = sp.report();
                v.exact += r.exact_match_rate();
                v.precision += r.precision();
                v.recall += r.recall();
                v.failures += static_cast<double>(sp.failures);
                v.compose_calls += static_cast<double>(sp.compose_calls);
                v.wall_ms += sp.wall_ms;
                ++n;
            }
            if (n > 0) {
                v.exact /= n;
                v.precision /= n;
                v.recall /= n;
                v.failures /= n;
                v.compose_calls /= n;
                v.wall_ms /= n;
            }
        }
        return out;
    }

    std::string results_csv() const {
        std::string out =
            "estimator,discard,max_depth,search,derivations,tree_dop,split,"
            "exact,precision,recall,failures,compose_calls,sentences\n";
        for (const auto& sp : splits) {
            ScoreReport r = sp.report();
            char buf[160];
            std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f", r.exact_match_rate(), r.precision(),
                          r.recall());
            out += std::string(estimator_name(sp.variant.estimator)) + "," +
                   (sp.variant.discard ? "1" : "0") + "," + std::to_string(sp.variant.max_depth) +
                   "," + search_name(sp.variant.search) + "," +
                   std::to_string(sp.variant.derivations) + "," +
                   (sp.variant.tree_dop ? "1" : "0") + "," + std::to_string(sp.split) + "," + buf +
                   "," + std::to_string(sp.failures) + "," + std::to_string(sp.compose_calls) +
                   "," + std::to_string(sp.sentences.size()) + "\n";
        }
        return out;
    }

    std::string per_sentence_csv() const {
        std::string out = "variant,split,sentence,exact,correct,proposed,gold,parsed\n";
        for (const auto& sp : splits)
            for (const auto& s : sp.sentences)
                out += sp.variant.label() + "," + std::to_string(sp.split) + "," +
                       std::to_string(s.sentence) + "," + (s.score.exact ? "1" : "0") + "," +
                       std::to_string(s.score.correct) + "," + std::to_string(s.score.proposed) +
                       "," + std::to_string(s.score.gold) + "," + (s.parsed ? "1" : "0") + "\n";
        return out;
    }

    std::string summary_csv() const {
        std::string out =
            "estimator,discard,max_depth,search,derivations,tree_dop,"
            "exact,precision,recall,failures,compose_calls\n";
        for (const auto& v : summaries()) {
            char buf[200];
            std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.3f,%.1f", v.exact, v.precision,
                          v.recall, v.failures, v.compose_calls);
            out += std::string(estimator_name(v.variant.estimator)) + "," +
                   (v.variant.discard ? "1" : "0") + "," + std::to_string(v.variant.max_depth) +
                   "," + search_name(v.variant.search) + "," +
                   std::to_string(v.variant.derivations) + "," + (v.variant.tree_dop ? "1" : "0") +
                   "," + buf + "\n";
        }
        return out;
    }

    std::string report_text() const {
        std::ostringstream out;
        out << "variant                                            exact   precision  recall   "
               "failures  compose    wall-ms\n";
        for (const auto& v : summaries()) {
            char buf[256];
            std::snprintf(buf, sizeof buf, "%-50s %6.1f%%   %6.1f%%  %6.1f%%   %7.2f  %9.0f  %9.1f\n",
                          v.variant.label().c_str(), 100 * v.exact, 100 * v.precision,
                          100 * v.recall, v.failures, v.compose_calls, v.wall_ms);
            out << buf;
        }
        return out.str();
    }
};

namespace detail {

// Per-split and per-sentence seeds from the global seed (splitmix64).
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
inline std::uint64_t derive_seed(std::uint64_t seed, int split, int sentence_id) {
    return mix64(mix64(seed + static_cast<std::uint64_t>(split) + 1) +
                 static_cast<std::uint64_t>(sentence_id));
}

// Tree-DOP ablation: all units collapse into one empty unit per entry.
inline Corpus strip_fstructures(const Corpus& corpus) {
    Corpus out = corpus;
    for (auto& e : out.entries) {
        FUnit u;
        u.id = 1;
        e.gold.fstruct.units.clear();
        e.gold.fstruct.units[1] = u;
        e.gold.fstruct.outer = 1;
        for (auto& [n, uid] : e.gold.phi) uid = 1;
    }
    return out;
}

} // namespace detail

struct ParseRequest {
    SearchKind search = SearchKind::Viterbi;
    long derivations = 0;   // overrides the defaults when > 0
    long n_best = 100;
    long max_samples = 10000;
    double error_threshold = 0.05;
    long batch = 100;
    bool rescore = true;
    long oracle_guard = 1000000;
    std::uint64_t seed = 1;
};

struct ParseOutcome {
    bool parsed = false;
    Representation analysis;
    std::string analysis_canonical;
    std::string failure;
    long compose_calls = 0;
};

// One sentence end to end: chart, search, winner.
inline ParseOutcome parse_sentence(const std::vector<std::string>& tokens,
                                   const FragmentBank& bank, const ParseRequest& req,
                                   const DecodeOptions& opts) {
    ParseOutcome out;
    ComposeStats stats;
    try {
        ChartOptions copts;
        copts.initial_category = opts.initial_category;
        Chart chart = build_chart(tokens, bank, copts);
        if (!chart.has_root()) throw Error(ErrorKind::NoParse, "no chart parse");
        switch (req.search) {
        case SearchKind::MonteCarlo: {
            MonteCarloOptions mc;
            mc.max_samples = req.derivations > 0 ? req.derivations : req.max_samples;
            mc.error_threshold = req.error_threshold;
            mc.batch = req.batch;
            mc.seed = req.seed;
            MonteCarloResult r = monte_carlo_parse(chart, bank, mc, opts, &stats);
            out.analysis = std::move(r.analysis);
            out.analysis_canonical = std::move(r.analysis_canonical);
            break;
        }
        case SearchKind::Viterbi: {
            long n = req.derivations > 0 ? req.derivations : req.n_best;
            if (n <= 0) n = count_derivations(chart, req.oracle_guard);
            ViterbiResult r = viterbi_parse(chart, bank, n, req.rescore, opts, &stats);
            out.analysis = std::move(r.analysis);
            out.analysis_canonical = std::move(r.analysis_canonical);
            break;
        }
        case SearchKind::Brute: {
            OracleDistribution dist = brute_force_parse(chart, bank, req.oracle_guard, opts, &stats);
            std::string best = dist.argmax();
            if (best.empty()) throw Error(ErrorKind::NoParse, "no valid analysis");
            out.analysis = dist.analyses.at(best);
            out.analysis_canonical = best;
            break;
        }
        }
        out.parsed = true;
    } catch (const Error& e) {
        out.failure = e.what();
    }
    out.compose_calls = stats.compose_calls;
    return out;
}

inline ExperimentResult run_experiment(const Corpus& corpus, const ExperimentConfig& cfg) {
    ExperimentResult result;

    for (int split = 0; split < cfg.n_splits; ++split) {
        Split sp = split_corpus(corpus, cfg.ratio, detail::mix64(cfg.seed + split));
        Corpus train_full = subset_corpus(corpus, sp.train_ids);
        Corpus test = subset_corpus(corpus, sp.test_ids);

        for (bool tree_dop : cfg.tree_dop_options) {
            Corpus train = tree_dop ? detail::strip_fstructures(train_full) : train_full;
            for (int depth : cfg.max_depths) {
                for (bool discard : cfg.discard_options) {
                    EnumerateOptions eo;
                    eo.max_depth = depth;
                    eo.include_discard = discard;
                    eo.protect_pred = cfg.protect_pred;
                    eo.discard_cap = cfg.discard_cap;
                    FragmentBank bank;
                    {
                        // scope releases the multiset before parsing
                        FragmentMultiset fragments = extract_fragments(train, eo);
                        bank = build_bank(fragments, cfg.estimators.front());
                    }
                    for (Estimator est : cfg.estimators) {
                        estimate_bank(bank, est);
                        for (SearchKind search : cfg.searches) {
                            for (long derivs : cfg.derivations) {
                                VariantKey key{est, discard, depth, search, derivs, tree_dop};
                                SplitOutcome so;
                                so.variant = key;
                                so.split = split;
                                so.sentences.resize(test.entries.size());

                                auto t0 = std::chrono::steady_clock::now();
                                auto work = [&](size_t i) {
                                    const CorpusEntry& e = test.entries[i];
                                    ParseRequest req;
                                    req.search = search;
                                    req.derivations = derivs;
                                    req.n_best = cfg.n_best;
                                    req.max_samples = cfg.max_samples;
                                    req.error_threshold = cfg.error_threshold;
                                    req.batch = cfg.batch;
                                    req.rescore = cfg.rescore;
                                    req.oracle_guard = cfg.oracle_guard;
                                    req.seed = detail::derive_seed(cfg.seed, split, e.id);
                                    DecodeOptions dopts;
                                    dopts.initial_category = cfg.initial_category;
                                    dopts.validity.governable = cfg.governable;
                                    ParseOutcome po = parse_sentence(e.tokens, bank, req, dopts);

                                    SentenceOutcome& out = so.sentences[i];
                                    out.sentence = e.id;
                                    out.parsed = po.parsed;
                                    out.compose_calls = po.compose_calls;
                                    out.failure = po.failure;
                                    EvalMode mode = tree_dop ? EvalMode::TreeOnly : cfg.eval_mode;
                                    if (po.parsed) {
                                        out.analysis_canonical = po.analysis_canonical;
                                        out.score = score_pair(po.analysis, e.gold, mode);
                                    } else {
                                        out.score.correct = 0;
                                        out.score.proposed = 0;
                                        out.score.gold =
                                            static_cast<long>(constituents(e.gold).size());
                                        out.score.exact = false;
                                    }
                                    out.score.id = e.id;
                                };

                                if (cfg.jobs <= 1) {
                                    for (size_t i = 0; i < test.entries.size(); ++i) work(i);
                                } else {
                                    std::vector<std::thread> pool;
                                    std::atomic<size_t> next{0};
                                    int jobs = std::min<int>(cfg.jobs,
                                                             static_cast<int>(test.entries.size()));
                                    for (int j = 0; j < jobs; ++j)
                                        pool.emplace_back([&] {
                                            for (size_t i = next.fetch_add(1);
                                                 i < test.entries.size(); i = next.fetch_add(1))
                                                work(i);
                                        });
                                    for (auto& t : pool) t.join();
                                }

                                for (const auto& s : so.sentences) {
                                    so.compose_calls += s.compose_calls;
                                    if (!s.parsed) ++so.failures;
                                }
                                so.wall_ms = std::chrono::duration<double, std::milli>(
                                                 std::chrono::steady_clock::now() - t0)
                                                 .count();
                                result.splits.push_back(std::move(so));
                            }
                        }
                    }
                }
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------
// Flat key=value config files. Lists use commas, integer ranges use
// a..b, and estimator/discard axes accept "both".

inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw Error(ErrorKind::Data, "config line " + std::to_string(lineno) + ": " + msg);
    };
    auto detail_strip = [](const std::string& s) {
        size_t a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        size_t b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    };
    auto split_list = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == ',') { out.push_back(cur); cur.clear(); }
            else cur += c;
        }
        out.push_back(cur);
        return out;
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::string s = detail_strip(line);
        if (s.empty() || s[0] == '#') continue;
        size_t eq = s.find('=');
        if (eq == std::string::npos) fail("expected key=value");
        std::string key = detail_strip(s.substr(0, eq));
        std::string val = detail_strip(s.substr(eq + 1));
        if (key == "corpus") cfg.corpus_path = val;
        else if (key == "ratio") cfg.ratio = std::stod(val);
        else if (key == "n_splits") cfg.n_splits = std::stoi(val);
        else if (key == "seed") cfg.seed = std::stoull(val);
        else if (key == "max_depth") {
            cfg.max_depths.clear();
            size_t dots = val.find("..");
            if (dots != std::string::npos) {
                int a = std::stoi(val.substr(0, dots));
                int b = std::stoi(val.substr(dots + 2));
                for (int d = a; d <= b; ++d) cfg.max_depths.push_back(d);
            } else {
                for (const auto& v : split_list(val)) cfg.max_depths.push_back(std::stoi(v));
            }
        } else if (key == "estimator") {
            cfg.estimators.clear();
            if (val == "both") cfg.estimators = {Estimator::SimpleRf, Estimator::DiscountedRf};
            else
                for (const auto& v : split_list(val)) {
                    if (v == "simple") cfg.estimators.push_back(Estimator::SimpleRf);
                    else if (v == "discounted") cfg.estimators.push_back(Estimator::DiscountedRf);
                    else fail("unknown estimator " + v);
                }
        } else if (key == "discard") {
            cfg.discard_options.clear();
            if (val == "both") cfg.discard_options = {true, false};
            else if (val == "on" || val == "true" || val == "1") cfg.discard_options = {true};
            else if (val == "off" || val == "false" || val == "0") cfg.discard_options = {false};
            else fail("unknown discard option " + val);
        } else if (key == "protect_pred") cfg.protect_pred = val == "on" || val == "true" || val == "1";
        else if (key == "discard_cap") cfg.discard_cap = std::stol(val);
        else if (key == "search") {
            cfg.searches.clear();
            if (val == "both") cfg.searches = {SearchKind::Viterbi, SearchKind::MonteCarlo};
            else
                for (const auto& v : split_list(val)) {
                    if (v == "mc") cfg.searches.push_back(SearchKind::MonteCarlo);
                    else if (v == "viterbi") cfg.searches.push_back(SearchKind::Viterbi);
                    else if (v == "brute") cfg.searches.push_back(SearchKind::Brute);
                    else fail("unknown search " + v);
                }
        } else if (key == "derivations") {
            cfg.derivations.clear();
            for (const auto& v : split_list(val)) cfg.derivations.push_back(std::stol(v));
        } else if (key == "n_best") cfg.n_best = std::stol(val);
        else if (key == "max_samples") cfg.max_samples = std::stol(val);
        else if (key == "error_threshold") cfg.error_threshold = std::stod(val);
        else if (key == "batch") cfg.batch = std::stol(val);
        else if (key == "rescore") cfg.rescore = val == "on" || val == "true" || val == "1";
        else if (key == "oracle_guard") cfg.oracle_guard = std::stol(val);
        else if (key == "tree_dop") {
            cfg.tree_dop_options.clear();
            if (val == "both") cfg.tree_dop_options = {false, true};
            else if (val == "on" || val == "true" || val == "1") cfg.tree_dop_options = {true};
            else cfg.tree_dop_options = {false};
        } else if (key == "eval") {
            if (val == "full") cfg.eval_mode = EvalMode::Full;
            else if (val == "tree") cfg.eval_mode = EvalMode::TreeOnly;
            else fail("unknown eval mode " + val);
        } else if (key == "initial_category") cfg.initial_category = val;
        else if (key == "jobs") cfg.jobs = std::stoi(val);
        else if (key == "out_dir") cfg.out_dir = val;
        else fail("unknown key " + key);
    }
    return cfg;
}

} // namespace lfgdop

#endif

// Command-line front end: corpus validation, fragment extraction,
// parsing with the three search strategies, experiment runs and scoring.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 no parse found.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lfgdop/experiment.hpp"

namespace {

using namespace lfgdop;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Data, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Data, "cannot write " + path);
    out << text;
}

int exit_code(const Error& e) {
    switch (e.kind) {
    case ErrorKind::Usage: return 1;
    case ErrorKind::NoParse: return 3;
    default: return 2;
    }
}

std::vector<std::string> tokenize(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

int cmd_validate(const std::string& path) {
    Corpus corpus = parse_corpus_file(read_file(path));
    long tokens = 0;
    for (const auto& e : corpus.entries) tokens += static_cast<long>(e.tokens.size());
    std::cout << path << ": " << corpus.entries.size() << " entries, " << tokens << " tokens, "
              << corpus.vocabulary.size() << " word types, all well-formed\n";
    return 0;
}

int cmd_fragments(const std::string& path, int max_depth, bool discard, bool protect_pred,
                  long discard_cap) {
    Corpus corpus = parse_corpus_file(read_file(path));
    EnumerateOptions eo;
    eo.max_depth = max_depth;
    eo.include_discard = discard;
    eo.protect_pred = protect_pred;
    eo.discard_cap = discard_cap;
    FragmentBank bank = build_bank(extract_fragments(corpus, eo), Estimator::DiscountedRf);
    std::cout << dump_bank(bank);
    std::cerr << "root/frontier: " << bank.rf_bag.size() << " types, " << bank.rf_tokens
              << " tokens; discard: " << bank.discard_bag.size() << " types, "
              << bank.discard_tokens << " tokens; n1=" << bank.n1 << "\n";
    return 0;
}

int cmd_parse(const std::string& path, const std::string& sentence, const std::string& search,
              long n, long max_samples, double error_prob, std::uint64_t seed,
              const std::string& estimator, int max_depth, bool discard, bool protect_pred,
              bool rescore, const std::string& initial) {
    Corpus corpus = parse_corpus_file(read_file(path));
    EnumerateOptions eo;
    eo.max_depth = max_depth;
    eo.include_discard = discard;
    eo.protect_pred = protect_pred;
    FragmentBank bank = build_bank(
        extract_fragments(corpus, eo),
        estimator == "simple" ? Estimator::SimpleRf : Estimator::DiscountedRf);

    ParseRequest req;
    req.search = search == "mc"      ? SearchKind::MonteCarlo
                 : search == "brute" ? SearchKind::Brute
                                     : SearchKind::Viterbi;
    req.n_best = n;
    req.max_samples = max_samples;
    req.error_threshold = error_prob;
    req.seed = seed;
    req.rescore = rescore;
    DecodeOptions dopts;
    dopts.initial_category = initial;

    ParseOutcome out = parse_sentence(tokenize(sentence), bank, req, dopts);
    if (!out.parsed) throw Error(ErrorKind::NoParse, out.failure);

    CorpusEntry entry;
    entry.id = 0;
    entry.tokens = tokenize(sentence);
    entry.gold = out.analysis;
    std::cout << serialize_entry(entry);
    std::cerr << "search=" << search << " compose_calls=" << out.compose_calls << "\n";
    return 0;
}

int cmd_experiment(const std::string& config_path) {
    ExperimentConfig cfg = parse_config(read_file(config_path));
    if (cfg.corpus_path.empty())
        throw Error(ErrorKind::Usage, "config is missing the corpus= key");
    Corpus corpus = parse_corpus_file(read_file(cfg.corpus_path));
    ExperimentResult result = run_experiment(corpus, cfg);
    std::cout << result.report_text();
    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        write_file(cfg.out_dir + "/results.csv", result.results_csv());
        write_file(cfg.out_dir + "/per_sentence.csv", result.per_sentence_csv());
        write_file(cfg.out_dir + "/summary.csv", result.summary_csv());
        write_file(cfg.out_dir + "/report.txt", result.report_text());
        std::cout << "wrote results.csv, per_sentence.csv, summary.csv, report.txt to "
                  << cfg.out_dir << "\n";
    }
    return 0;
}

int cmd_score(const std::string& proposed_path, const std::string& gold_path,
              const std::string& mode) {
    Corpus proposed = parse_corpus_file(read_file(proposed_path));
    Corpus gold = parse_corpus_file(read_file(gold_path));
    EvalMode m = mode == "tree" ? EvalMode::TreeOnly : EvalMode::Full;

    ScoreReport report;
    for (const auto& p : proposed.entries) {
        const CorpusEntry* g = gold.find(p.id);
        if (!g) throw Error(ErrorKind::Data, "gold corpus has no entry " + std::to_string(p.id));
        SentenceScore s = score_pair(p.gold, g->gold, m);
        s.id = p.id;
        report.sentences.push_back(s);
    }
    std::cout << report.to_csv();
    char buf[160];
    std::snprintf(buf, sizeof buf, "exact_match=%.4f precision=%.4f recall=%.4f\n",
                  report.exact_match_rate(), report.precision(), report.recall());
    std::cerr << buf;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-oriented parsing over LFG representations"};
    app.require_subcommand(1);

    std::string corpus_path, sentence, config_path, proposed_path, gold_path;
    std::string search = "viterbi", estimator = "discounted", mode = "full", initial = "S";
    int max_depth = 4;
    bool discard = true, protect_pred = false, rescore = true;
    long n = 100, max_samples = 10000, discard_cap = -1;
    double error_prob = 0.05;
    std::uint64_t seed = 1;

    auto* validate = app.add_subcommand("validate", "check corpus well-formedness");
    validate->add_option("corpus", corpus_path)->required();

    auto* fragments = app.add_subcommand("fragments", "extract the fragment bank");
    fragments->add_option("corpus", corpus_path)->required();
    fragments->add_option("--max-depth", max_depth);
    fragments->add_flag("--discard,!--no-discard", discard, "include Discard generalizations");
    fragments->add_flag("--protect-pred", protect_pred);
    fragments->add_option("--discard-cap", discard_cap);

    auto* parse = app.add_subcommand("parse", "train on a corpus and parse one sentence");
    parse->add_option("corpus", corpus_path)->required();
    parse->add_option("sentence", sentence)->required();
    parse->add_option("--search", search)->check(CLI::IsMember({"mc", "viterbi", "brute"}));
    parse->add_option("--n", n, "viterbi n-best size");
    parse->add_option("--max-samples", max_samples);
    parse->add_option("--error-prob", error_prob);
    parse->add_option("--seed", seed);
    parse->add_option("--estimator", estimator)->check(CLI::IsMember({"simple", "discounted"}));
    parse->add_option("--max-depth", max_depth);
    parse->add_flag("--discard,!--no-discard", discard);
    parse->add_flag("--protect-pred", protect_pred);
    parse->add_flag("--rescore,!--no-rescore", rescore, "exact competition rescoring");
    parse->add_option("--initial-category", initial);

    auto* experiment = app.add_subcommand("experiment", "run a split experiment from a config");
    experiment->add_option("config", config_path)->required();

    auto* score = app.add_subcommand("score", "score proposed analyses against gold");
    score->add_option("proposed", proposed_path)->required();
    score->add_option("gold", gold_path)->required();
    score->add_option("--mode", mode)->check(CLI::IsMember({"full", "tree"}));

    try {
        app.parse(argc, argv);
        if (validate->parsed()) return cmd_validate(corpus_path);
        if (fragments->parsed())
            return cmd_fragments(corpus_path, max_depth, discard, protect_pred, discard_cap);
        if (parse->parsed())
            return cmd_parse(corpus_path, sentence, search, n, max_samples, error_prob, seed,
                             estimator, max_depth, discard, protect_pred, rescore, initial);
        if (experiment->parsed()) return cmd_experiment(config_path);
        if (score->parsed()) return cmd_score(proposed_path, gold_path, mode);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const lfgdop::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

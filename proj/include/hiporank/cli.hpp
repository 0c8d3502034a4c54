#pragma once

// Command-line front end. Subcommands:
//   summarize, evaluate, oracle, lead, sweep, positions, stats, export-graph
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <hiporank/analysis.hpp>
#include <hiporank/corpus.hpp>
#include <hiporank/embed.hpp>
#include <hiporank/eval.hpp>
#include <hiporank/graph.hpp>
#include <hiporank/parallel.hpp>
#include <hiporank/rank.hpp>
#include <hiporank/summarize.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

namespace hiporank::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Rank flags shared by summarize, sweep and export-graph. A preset supplies
/// the defaults; any flag given explicitly (or through --config) wins.
struct RankFlags {
    std::string preset = "pubmed";
    double alpha = 1.0;
    double lambda1 = 0.0;
    double lambda2 = 1.0;
    std::string beta = "-inf";
    double mu1 = 0.5;
    std::size_t word_limit = 203;
    std::string positional = "boundary";
    std::string hierarchy = "add";
    std::string norm = "neighbors";

    CLI::Option* alpha_opt = nullptr;
    CLI::Option* lambda1_opt = nullptr;
    CLI::Option* lambda2_opt = nullptr;
    CLI::Option* beta_opt = nullptr;
    CLI::Option* mu1_opt = nullptr;
    CLI::Option* word_limit_opt = nullptr;
    CLI::Option* positional_opt = nullptr;
    CLI::Option* hierarchy_opt = nullptr;
    CLI::Option* norm_opt = nullptr;

    void add_to(CLI::App* app, bool with_preset = true) {
        if (with_preset)
            app->add_option("--preset", preset, "Dataset defaults (mu1, word limit)")
                ->check(CLI::IsMember({"pubmed", "arxiv"}))
                ->capture_default_str();
        alpha_opt = app->add_option("--alpha", alpha, "Weight of the distance to the end boundary")->capture_default_str();
        lambda1_opt = app->add_option("--lambda1", lambda1, "Weight of edges into the less boundary-close sentence")->capture_default_str();
        lambda2_opt = app->add_option("--lambda2", lambda2, "Weight of edges into the more boundary-close sentence")->capture_default_str();
        beta_opt = app->add_option("--beta", beta, "Prune edge weights below this value (-inf disables)")->capture_default_str();
        mu1_opt = app->add_option("--mu1", mu1, "Weight of inter-section centrality")->capture_default_str();
        word_limit_opt = app->add_option("--word-limit,-L", word_limit, "Summary word limit")->capture_default_str();
        positional_opt = app->add_option("--positional", positional, "Positional function")
                             ->check(CLI::IsMember({"boundary", "lead", "undirected"}))
                             ->capture_default_str();
        hierarchy_opt = app->add_option("--hierarchy", hierarchy, "Hierarchy mode")
                            ->check(CLI::IsMember({"add", "multiply", "none"}))
                            ->capture_default_str();
        norm_opt = app->add_option("--norm", norm, "Centrality denominators")
                       ->check(CLI::IsMember({"neighbors", "size"}))
                       ->capture_default_str();
    }

    RankConfig resolve() const {
        RankConfig c = preset == "arxiv" ? RankConfig::arxiv() : RankConfig::pubmed();
        auto given = [](const CLI::Option* o) { return o != nullptr && o->count() > 0; };
        if (given(alpha_opt)) c.alpha = alpha;
        if (given(lambda1_opt)) c.lambda1 = lambda1;
        if (given(lambda2_opt)) c.lambda2 = lambda2;
        if (given(beta_opt)) c.beta = parse_beta(beta);
        if (given(mu1_opt)) c.mu1 = mu1;
        if (given(word_limit_opt)) c.word_limit = word_limit;
        if (given(positional_opt)) c.positional = parse_positional(positional);
        if (given(hierarchy_opt)) c.hierarchy = parse_hierarchy(hierarchy);
        if (given(norm_opt)) c.norm = parse_normalization(norm);
        try {
            c.validate();
        } catch (const Error& e) {
            throw CLI::ValidationError("rank options", e.what());
        }
        return c;
    }

    static double parse_beta(const std::string& s) {
        try {
            std::size_t used = 0;
            double v = std::stod(s, &used);
            if (used == s.size()) return v;
        } catch (const std::exception&) {
        }
        throw CLI::ValidationError("--beta", "not a number: " + s);
    }
};

/// Collects warnings from any thread; prints the first few and counts all.
class WarningLog {
public:
    explicit WarningLog(std::ostream& err, std::size_t print_limit = 20) : err_(err), print_limit_(print_limit) {}

    WarningSink sink() {
        return [this](const std::string& msg) {
            std::lock_guard lock(mutex_);
            if (count_ < print_limit_) err_ << "warning: " << msg << '\n';
            ++count_;
        };
    }

    std::size_t count() const {
        std::lock_guard lock(mutex_);
        return count_;
    }

private:
    std::ostream& err_;
    std::size_t print_limit_;
    mutable std::mutex mutex_;
    std::size_t count_ = 0;
};

class App {
public:
    App(std::ostream& out, std::ostream& err) : out_(out), err_(err), log_(err) { build(); }

    int run(std::vector<std::string> args) {
        std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
        try {
            app_.parse(args);
            workers_from_environment();
        } catch (const CLI::CallForHelp&) {
            out_ << app_.help();
            return kExitOk;
        } catch (const CLI::CallForAllHelp&) {
            out_ << app_.help("", CLI::AppFormatMode::All);
            return kExitOk;
        } catch (const CLI::ParseError& e) {
            report_error("usage", e.what());
            return kExitUsage;
        }
        try {
            return dispatch();
        } catch (const CLI::ParseError& e) {
            report_error("usage", e.what());
            return kExitUsage;
        } catch (const std::exception& e) {
            report_error("runtime", e.what());
            return kExitFailure;
        }
    }

    /// Current option values in config-file form (only explicitly set values).
    std::string config_dump() const { return app_.config_to_str(false, false); }

    CLI::App& parser() { return app_; }

private:
    // Common options
    std::size_t workers_ = default_workers();
    CLI::Option* workers_opt_ = nullptr;
    bool strict_ = false;
    std::size_t limit_ = 0;
    std::uint64_t seed_ = 0;

    // Per-command options
    std::string input_;
    std::string out_path_ = "-";
    std::string scores_out_;
    std::string provider_ = "random:200";
    std::vector<std::string> providers_;
    std::string budget_ = "inclusive";
    std::string system_;
    std::string reference_;
    std::string csv_path_;
    std::string out_json_;
    bool stem_ = false;
    std::size_t baseline_limit_ = 203;
    std::string grid_preset_ = "full-grid";
    std::size_t sweep_limit_ = 1000;
    std::size_t bins_ = 20;
    RankFlags summarize_flags_;
    RankFlags graph_flags_;
    RankFlags sweep_flags_;

    CLI::App app_{"Unsupervised extractive summarization of long sectioned documents", "hiporank"};
    CLI::App* summarize_ = nullptr;
    CLI::App* evaluate_ = nullptr;
    CLI::App* oracle_ = nullptr;
    CLI::App* lead_ = nullptr;
    CLI::App* sweep_ = nullptr;
    CLI::App* positions_ = nullptr;
    CLI::App* stats_ = nullptr;
    CLI::App* export_graph_ = nullptr;

    std::ostream& out_;
    std::ostream& err_;
    WarningLog log_;

    void workers_from_environment() {
        if (workers_opt_->count() > 0) return;
        const char* env = std::getenv("HIPORANK_WORKERS");
        if (!env || !*env) return;
        std::size_t value = 0;
        const auto [end, ec] = std::from_chars(env, env + std::strlen(env), value);
        if (ec != std::errc{} || *end != '\0' || value == 0)
            throw CLI::ValidationError("HIPORANK_WORKERS", std::string("expected a positive integer, got '") + env + "'");
        workers_ = value;
    }

    void build() {
        app_.require_subcommand(1);
        app_.set_config("--config", "", "Read options from a config file (TOML/INI)");
        workers_opt_ = app_.add_option("--workers,-j", workers_, "Worker threads (default: HIPORANK_WORKERS or hardware concurrency)")
                           ->check(CLI::PositiveNumber);
        app_.add_flag("--strict", strict_, "Fail on malformed input instead of skipping it");
        app_.add_option("--limit", limit_, "Read at most this many documents (0 = all)");
        app_.add_option("--seed", seed_, "Seed for random embeddings when the provider spec omits one");

        auto input = [&](CLI::App* sub, std::string& target, const std::string& name, const std::string& help) {
            return sub->add_option(name, target, help)->required()->check(CLI::ExistingFile);
        };

        summarize_ = app_.add_subcommand("summarize", "Rank sentences and write extractive summaries");
        input(summarize_, input_, "--input,-i", "Corpus JSONL");
        summarize_->add_option("--provider,-p", provider_, "Embedding provider spec")->capture_default_str();
        summarize_->add_option("--out,-o", out_path_, "Summaries JSONL ('-' for stdout)")->capture_default_str();
        summarize_->add_option("--scores-out", scores_out_, "Per-sentence centrality JSONL");
        summarize_->add_option("--budget", budget_, "Keep (inclusive) or drop (strict) the sentence crossing the word limit")
            ->check(CLI::IsMember({"inclusive", "strict"}))
            ->capture_default_str();
        summarize_flags_.add_to(summarize_);

        evaluate_ = app_.add_subcommand("evaluate", "ROUGE-1/2/L F1 of system summaries against reference abstracts");
        input(evaluate_, system_, "--system,-s", "System summaries JSONL");
        input(evaluate_, reference_, "--reference,-r", "Reference corpus JSONL");
        evaluate_->add_option("--out,-o", out_path_, "JSON report ('-' for stdout)")->capture_default_str();
        evaluate_->add_option("--csv", csv_path_, "Also write a per-document CSV");
        evaluate_->add_flag("--stem", stem_, "Porter-stem tokens before matching");

        oracle_ = app_.add_subcommand("oracle", "Greedy ROUGE-2 oracle summaries");
        input(oracle_, input_, "--input,-i", "Corpus JSONL");
        oracle_->add_option("--out,-o", out_path_, "Summaries JSONL ('-' for stdout)")->capture_default_str();
        oracle_->add_option("--word-limit,-L", baseline_limit_, "Word limit")->capture_default_str();
        oracle_->add_flag("--stem", stem_, "Porter-stem tokens before matching");

        lead_ = app_.add_subcommand("lead", "Lead baseline: the first k tokens' worth of sentences");
        input(lead_, input_, "--input,-i", "Corpus JSONL");
        lead_->add_option("--out,-o", out_path_, "Summaries JSONL ('-' for stdout)")->capture_default_str();
        lead_->add_option("--word-limit,-L,-k", baseline_limit_, "Token budget")->capture_default_str();

        sweep_ = app_.add_subcommand("sweep", "Evaluate a hyperparameter grid");
        input(sweep_, input_, "--input,-i", "Validation corpus JSONL");
        sweep_->add_option("--provider,-p", providers_, "Embedding provider spec (repeatable)");
        sweep_->add_option("--preset", grid_preset_, "Grid preset")
            ->check(CLI::IsMember({"full-grid", "ablation"}))
            ->capture_default_str();
        sweep_->add_option("--out,-o,--out-csv", out_path_, "CSV table ('-' for stdout)")->capture_default_str();
        sweep_->add_option("--out-json", out_json_, "Also write the table as JSON");
        sweep_->add_option("--sample", sweep_limit_, "Documents evaluated (0 = all)")->capture_default_str();
        sweep_->add_option("--budget", budget_, "Word-limit mode")
            ->check(CLI::IsMember({"inclusive", "strict"}))
            ->capture_default_str();
        sweep_->add_flag("--stem", stem_, "Porter-stem tokens before matching");
        sweep_flags_.add_to(sweep_, false);

        positions_ = app_.add_subcommand("positions", "Relative positions of selected sentences (CSV)");
        input(positions_, system_, "--summaries,-s", "Summaries JSONL");
        input(positions_, reference_, "--reference,-r", "Corpus JSONL");
        positions_->add_option("--bins", bins_, "Histogram bins")->check(CLI::PositiveNumber)->capture_default_str();
        positions_->add_option("--out,-o", out_path_, "CSV ('-' for stdout)")->capture_default_str();

        stats_ = app_.add_subcommand("stats", "Corpus statistics as JSON");
        input(stats_, input_, "--input,-i", "Corpus JSONL");

        export_graph_ = app_.add_subcommand("export-graph", "Dump document graphs as JSONL");
        input(export_graph_, input_, "--input,-i", "Corpus JSONL");
        export_graph_->add_option("--provider,-p", provider_, "Embedding provider spec")->capture_default_str();
        export_graph_->add_option("--out,-o", out_path_, "Graph JSONL ('-' for stdout)")->capture_default_str();
        graph_flags_.add_to(export_graph_);

        for (auto* sub : app_.get_subcommands({})) sub->fallthrough()->configurable();
    }

    void report_error(const std::string& kind, const std::string& message) {
        err_ << nlohmann::json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
    }

    void report_done(const nlohmann::json& extra) {
        nlohmann::json j{{"event", "done"}, {"warnings", log_.count()}};
        j.update(extra);
        err_ << j.dump() << '\n';
    }

    ParseOptions parse_options(std::optional<std::size_t> limit_override = std::nullopt) {
        ParseOptions o;
        o.strict = strict_;
        if (limit_override && *limit_override > 0)
            o.limit = *limit_override;
        else if (limit_ > 0)
            o.limit = limit_;
        o.on_warning = log_.sink();
        return o;
    }

    std::vector<Document> load(const std::string& path, ParseReport& report,
                               std::optional<std::size_t> limit_override = std::nullopt) {
        auto docs = parse_corpus(path, parse_options(limit_override), &report);
        if (docs.empty()) warn(log_.sink(), path + ": no documents");
        return docs;
    }

    /// Runs `write` against the requested path, or stdout for "-".
    template <class Fn>
    void with_output(const std::string& path, Fn&& write) {
        if (path == "-") {
            write(out_);
            out_.flush();
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error("cannot write " + path);
        write(f);
        if (!f) throw Error("write failed: " + path);
    }

    std::unique_ptr<EmbeddingProvider> provider_for(const std::vector<Document>& docs) {
        return make_provider(parse_provider_spec(provider_), &docs, seed_, log_.sink());
    }

    int dispatch() {
        if (summarize_->parsed()) return cmd_summarize();
        if (evaluate_->parsed()) return cmd_evaluate();
        if (oracle_->parsed()) return cmd_baseline(true);
        if (lead_->parsed()) return cmd_baseline(false);
        if (sweep_->parsed()) return cmd_sweep();
        if (positions_->parsed()) return cmd_positions();
        if (stats_->parsed()) return cmd_stats();
        if (export_graph_->parsed()) return cmd_export_graph();
        throw CLI::CallForHelp();
    }

    int cmd_summarize() {
        if (out_path_ == "-" && scores_out_ == "-")
            throw CLI::ValidationError("--scores-out", "summaries and scores cannot both go to stdout");
        const auto cfg = summarize_flags_.resolve();
        ParseReport report;
        const auto docs = load(input_, report);
        const auto provider = provider_for(docs);

        SummarizeOptions opt;
        opt.budget = parse_budget_mode(budget_);
        opt.workers = workers_;
        opt.strict = strict_;
        opt.on_warning = log_.sink();
        const auto results = summarize_corpus(docs, *provider, cfg, opt);

        std::size_t failed = 0;
        with_output(out_path_, [&](std::ostream& os) {
            for (const auto& r : results) {
                if (!r.summary) {
                    ++failed;
                    continue;
                }
                os << summary_to_json(*r.summary).dump() << '\n';
            }
        });
        if (!scores_out_.empty())
            with_output(scores_out_, [&](std::ostream& os) {
                for (std::size_t k = 0; k < results.size(); ++k)
                    if (results[k].summary) os << scores_to_json(docs[k].article_id, results[k].scores).dump() << '\n';
            });
        report_done({{"documents", docs.size()},
                     {"skipped_lines", report.skipped},
                     {"failed_documents", failed},
                     {"provider", provider->tag()},
                     {"config", to_json(cfg)}});
        return kExitOk;
    }

    int cmd_evaluate() {
        const auto system = read_summaries(system_);
        ParseReport report;
        const auto refs = load(reference_, report);
        const auto result = evaluate_corpus(system, refs, RougeOptions{stem_});
        with_output(out_path_, [&](std::ostream& os) { os << report_to_json(result).dump(2) << '\n'; });
        if (!csv_path_.empty()) with_output(csv_path_, [&](std::ostream& os) { os << report_to_csv(result); });
        report_done({{"documents", result.per_document.size()}, {"skipped_lines", report.skipped}});
        return kExitOk;
    }

    int cmd_baseline(bool oracle) {
        if (baseline_limit_ == 0) throw CLI::ValidationError("--word-limit", "must be positive");
        ParseReport report;
        const auto docs = load(input_, report);
        std::vector<std::optional<ScoredSummary>> out(docs.size());
        std::vector<std::string> errors(docs.size());
        parallel_for(docs.size(), workers_, [&](std::size_t k) {
            try {
                out[k] = oracle ? oracle_summary(docs[k], baseline_limit_, RougeOptions{stem_})
                                : lead_summary(docs[k], baseline_limit_);
            } catch (const Error& e) {
                errors[k] = e.what();
            }
        });
        std::size_t failed = 0;
        for (const auto& e : errors) {
            if (e.empty()) continue;
            if (strict_) throw Error(e);
            warn(log_.sink(), "skipping document " + e);
            ++failed;
        }
        with_output(out_path_, [&](std::ostream& os) {
            for (const auto& s : out)
                if (s) os << summary_to_json(*s).dump() << '\n';
        });
        report_done({{"documents", docs.size()}, {"skipped_lines", report.skipped}, {"failed_documents", failed}});
        return kExitOk;
    }

    int cmd_sweep() {
        SweepSpec spec = grid_preset_ == "ablation" ? SweepSpec::ablation() : SweepSpec::full_grid();
        // Rank flags only set the fixed parts of the grid (lambda2, beta, word limit, norm).
        const RankConfig fixed = sweep_flags_.resolve();
        spec.base.lambda2 = fixed.lambda2;
        spec.base.beta = fixed.beta;
        spec.base.word_limit = fixed.word_limit;
        spec.base.norm = fixed.norm;
        if (!providers_.empty()) spec.providers = providers_;
        for (const auto& p : spec.providers) parse_provider_spec(p);

        ParseReport report;
        const auto docs = load(input_, report, sweep_limit_);
        SweepOptions opt;
        opt.workers = workers_;
        opt.rouge.stem = stem_;
        opt.budget = parse_budget_mode(budget_);
        opt.default_seed = seed_;
        opt.on_warning = log_.sink();
        const auto rows = run_sweep(docs, spec, opt);

        with_output(out_path_, [&](std::ostream& os) { os << sweep_to_csv(rows); });
        if (!out_json_.empty()) with_output(out_json_, [&](std::ostream& os) { os << sweep_to_json(rows).dump(2) << '\n'; });
        std::size_t failed = 0;
        for (const auto& r : rows) failed += r.status != "ok";
        report_done({{"documents", docs.size()},
                     {"skipped_lines", report.skipped},
                     {"grid_points", rows.size()},
                     {"failed_points", failed}});
        return kExitOk;
    }

    int cmd_positions() {
        const auto summaries = read_summaries(system_);
        ParseReport report;
        const auto docs = load(reference_, report);
        const auto grid = position_histogram(summaries, docs, bins_);
        with_output(out_path_, [&](std::ostream& os) { os << positions_to_csv(grid); });
        report_done({{"documents", grid.rows.size()}, {"skipped_lines", report.skipped}});
        return kExitOk;
    }

    int cmd_stats() {
        CorpusReader reader(input_, parse_options());
        StatsAccumulator acc;
        while (auto d = reader.next()) acc.add(*d);
        auto j = to_json(acc.result());
        j["skipped_lines"] = reader.skipped();
        out_ << j.dump() << '\n';
        return kExitOk;
    }

    int cmd_export_graph() {
        const auto cfg = graph_flags_.resolve();
        ParseReport report;
        const auto docs = load(input_, report);
        const auto provider = provider_for(docs);
        std::size_t failed = 0;
        with_output(out_path_, [&](std::ostream& os) {
            for (const auto& d : docs) {
                try {
                    os << graph_to_json(build_graph(d, embed_document(d, *provider), cfg)).dump() << '\n';
                } catch (const Error& e) {
                    if (strict_) throw;
                    warn(log_.sink(), "skipping document " + d.article_id + ": " + e.what());
                    ++failed;
                }
            }
        });
        report_done({{"documents", docs.size()}, {"skipped_lines", report.skipped}, {"failed_documents", failed}});
        return kExitOk;
    }
};

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<std::string> args;
    for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
    App app(out, err);
    return app.run(std::move(args));
}

}  // namespace hiporank::cli

// omidet command-line driver: corpus ingestion, environment building,
// relation annotation or simulation, training, evaluation, taxonomy
// analysis, cost reports, and the full multi-seed experiment runner.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "omidet/config.hpp"
#include "omidet/pipeline.hpp"
#include "omidet/simulate.hpp"
#include "omidet/synthetic.hpp"

namespace fs = std::filesystem;
using namespace omidet;

namespace {

// --config wins; otherwise a config.txt already in the workspace;
// otherwise defaults. Stage commands persist the resolved config so later
// stages agree on it.
RunConfig resolve_config(const std::string& config_path, const Workspace& ws,
                         bool persist) {
    RunConfig cfg;
    if (!config_path.empty()) {
        cfg = load_run_config(config_path);
    } else if (fs::exists(ws.config_file())) {
        cfg = load_run_config(ws.config_file());
    }
    if (persist) {
        ws.ensure_layout();
        std::ofstream out(ws.config_file());
        out << dump_run_config(cfg);
    }
    return cfg;
}

// Omission samples for the taxonomy pipeline: one sample per flagged
// inter-edge pair in the annotated graphs (neutral fallback edges carry
// no omission signal and are skipped).
std::vector<std::pair<TypeSample, int>> collect_samples(const Workspace& ws,
                                                        int cap) {
    const Corpus targets =
        ingest_corpus(ws.corpus_dir() / "targets.jsonl", CorpusSchema::Target);
    std::vector<std::pair<TypeSample, int>> samples;
    for (const NewsItem& target : targets.items()) {
        const OmissionGraph g =
            load_graph(ws.annotated_dir() / graph_filename(target.id));
        std::set<std::pair<int, int>> seen;
        for (const auto& e : g.edges) {
            if (e.etype != EdgeType::Inter) continue;
            if (e.intent_text == "no omission detected") continue;
            const auto key = std::minmax(e.src, e.dst);
            if (!seen.insert({key.first, key.second}).second) continue;
            const int ctx_id = g.nodes[static_cast<std::size_t>(e.src)].source ==
                                       NodeSource::Context
                                   ? e.src
                                   : e.dst;
            const auto& ctx_node = g.nodes[static_cast<std::size_t>(ctx_id)];
            TypeSample s;
            s.segment = ctx_node.text;
            s.intent = e.intent_text;
            s.omitted = ctx_node.text;
            samples.push_back({std::move(s), g.label.value_or(0)});
            if (cap > 0 && static_cast<int>(samples.size()) >= cap) {
                return samples;
            }
        }
    }
    return samples;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"omission-aware misinformation detection pipeline"};
    app.require_subcommand(1);

    std::string workspace_path, config_path, targets_path, context_path;
    std::string split = "test", checkpoint_path, mode_override, out_path;
    std::string axis_name = "across-types";
    std::vector<std::string> workspace_list;
    bool force = false, print_defaults = false;
    int samples_cap = 0, batch_size = 25;
    SyntheticSpec syn;
    std::string syn_targets = "targets.jsonl", syn_context = "context.jsonl";

    auto add_ws = [&](CLI::App* cmd, bool with_config = true) {
        cmd->add_option("--workspace", workspace_path, "workspace directory")
            ->required();
        if (with_config) {
            cmd->add_option("--config", config_path, "run configuration file");
        }
    };

    auto* c_ingest = app.add_subcommand("ingest", "load corpora into a workspace");
    add_ws(c_ingest);
    c_ingest->add_option("--targets", targets_path, "target corpus (JSONL)")
        ->required();
    c_ingest->add_option("--context", context_path, "context corpus (JSONL)");
    c_ingest->add_flag("--force", force);

    auto* c_env = app.add_subcommand("build-env", "build per-target graphs");
    add_ws(c_env);
    c_env->add_flag("--force", force);

    auto* c_intents =
        app.add_subcommand("infer-intents", "annotate retrieved environments");
    add_ws(c_intents);
    c_intents->add_flag("--force", force);

    auto* c_sim =
        app.add_subcommand("simulate", "simulate environments with the annotator");
    add_ws(c_sim);
    c_sim->add_option("--mode", mode_override, "sim-zero or sim-rule")
        ->required();
    c_sim->add_flag("--force", force);

    auto* c_train = app.add_subcommand("train", "train the detector");
    add_ws(c_train);
    c_train->add_flag("--force", force);

    auto* c_eval = app.add_subcommand("eval", "evaluate a checkpoint");
    add_ws(c_eval);
    c_eval->add_option("--checkpoint", checkpoint_path, "checkpoint file");
    c_eval->add_option("--split", split, "train, val or test");

    auto* c_types = app.add_subcommand("analyze-types", "omission-type taxonomy");
    add_ws(c_types);
    c_types->add_option("--samples", samples_cap, "max samples (0 = all)");
    c_types->add_option("--batch", batch_size, "samples per analysis call");
    c_types->add_option("--axis", axis_name, "across-types or across-classes");

    auto* c_cost = app.add_subcommand("cost-report", "token costs across methods");
    c_cost->add_option("--workspace", workspace_list, "workspace(s) to scan")
        ->required();
    c_cost->add_option("--out", out_path, "write the JSON report here");

    auto* c_gen = app.add_subcommand("gen-synthetic", "generate a synthetic corpus");
    c_gen->add_option("--events", syn.n_events, "number of events");
    c_gen->add_option("--items-per-event", syn.items_per_event,
                      "context items per event");
    c_gen->add_option("--vocab", syn.fact_vocab, "vocabulary size");
    c_gen->add_option("--rate", syn.omission_rate, "fraction of causal tokens omitted");
    c_gen->add_option("--seed", syn.seed, "generator seed");
    c_gen->add_option("--out-targets", syn_targets, "target corpus output path");
    c_gen->add_option("--out-context", syn_context, "context corpus output path");

    auto* c_run = app.add_subcommand("run", "full multi-seed experiment");
    add_ws(c_run);
    c_run->add_option("--targets", targets_path, "target corpus (JSONL)")
        ->required();
    c_run->add_option("--context", context_path, "context corpus (JSONL)");
    c_run->add_flag("--force", force);

    auto* c_config = app.add_subcommand("config", "configuration utilities");
    c_config->add_flag("--print-defaults", print_defaults,
                       "print the default configuration");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_config->parsed()) {
            if (print_defaults) {
                std::cout << dump_run_config(default_run_config());
            } else {
                std::cout << c_config->help();
            }
            return 0;
        }
        if (c_gen->parsed()) {
            const SyntheticCorpora corpora = generate_synthetic(syn);
            write_corpus(corpora.targets, syn_targets, CorpusSchema::Target);
            write_corpus(corpora.context, syn_context, CorpusSchema::Context);
            std::cout << "wrote " << corpora.targets.size() << " targets to "
                      << syn_targets << " and " << corpora.context.size()
                      << " context items to " << syn_context << "\n";
            return 0;
        }
        if (c_cost->parsed()) {
            std::vector<fs::path> roots(workspace_list.begin(),
                                        workspace_list.end());
            const CostReport report = cost_report_from_workspaces(roots);
            std::cout << report.to_csv();
            if (!out_path.empty()) {
                std::ofstream out(out_path);
                out << report.to_json() << '\n';
            }
            return 0;
        }

        const Workspace ws{fs::path(workspace_path)};
        if (c_ingest->parsed()) {
            const RunConfig cfg = resolve_config(config_path, ws, true);
            stage_ingest(ws, cfg, targets_path, context_path, force);
            std::cout << "ingested corpora into " << ws.root() << "\n";
        } else if (c_env->parsed()) {
            const RunConfig cfg = resolve_config(config_path, ws, true);
            const int n = stage_build_env(ws, cfg, force);
            std::cout << "built " << n << " graphs\n";
        } else if (c_intents->parsed()) {
            RunConfig cfg = resolve_config(config_path, ws, true);
            if (cfg.pipeline_mode != "retrieve") {
                throw std::runtime_error(
                    "infer-intents needs pipeline.mode=retrieve (got " +
                    cfg.pipeline_mode + ")");
            }
            const AnnotateStats stats = stage_annotate(ws, cfg, force);
            std::cout << "annotated " << stats.items << " items ("
                      << stats.prompt_tokens + stats.completion_tokens
                      << " tokens, " << stats.degraded_items << " degraded, "
                      << stats.parse_warnings << " parse warnings)\n";
        } else if (c_sim->parsed()) {
            RunConfig cfg = resolve_config(config_path, ws, false);
            sim_mode_from_name(mode_override);  // validates the name
            cfg.pipeline_mode = mode_override;
            {
                ws.ensure_layout();
                std::ofstream out(ws.config_file());
                out << dump_run_config(cfg);
            }
            const AnnotateStats stats = stage_annotate(ws, cfg, force);
            std::cout << "simulated " << stats.items << " items ("
                      << stats.prompt_tokens + stats.completion_tokens
                      << " tokens, " << stats.degraded_items << " degraded)\n";
        } else if (c_train->parsed()) {
            const RunConfig cfg = resolve_config(config_path, ws, true);
            const TrainStageResult r = stage_train(ws, cfg, force);
            if (r.outcome.best_epoch < 0) {
                std::cout << "training already complete: " << r.checkpoint
                          << "\n";
            } else {
                std::cout << "trained " << r.outcome.history.size()
                          << " epochs, best epoch " << r.outcome.best_epoch
                          << " (val macro F1 " << r.outcome.best_val_macro_f1
                          << "), checkpoint " << r.checkpoint << "\n";
            }
        } else if (c_eval->parsed()) {
            const RunConfig cfg = resolve_config(config_path, ws, false);
            const MetricsReport report =
                stage_eval(ws, cfg, split, checkpoint_path);
            std::cout << MetricsReport::csv_header() << "\n"
                      << report.csv_row() << "\n";
        } else if (c_types->parsed()) {
            const RunConfig cfg = resolve_config(config_path, ws, false);
            auto labeled = collect_samples(ws, samples_cap);
            if (labeled.empty()) {
                throw std::runtime_error(
                    "no omission samples found; run infer-intents or simulate "
                    "first");
            }
            std::vector<TypeSample> samples;
            for (auto& [s, cls] : labeled) samples.push_back(s);
            auto bundle = [&] {
                std::shared_ptr<LlmClient> stub;
                if (cfg.client.kind == LlmClientKind::Stub) {
                    stub = std::make_shared<StubLlmClient>();
                }
                return make_llm_client(cfg.client, ws.llm_cache_dir(), stub);
            }();
            const TypeAnalysisResult analysis = analyze_types(
                samples, batch_size, *bundle, cfg.client.model_name);
            std::vector<std::string> order;
            for (const auto& t : analysis.final_types) {
                order.push_back(t.display_name());
            }
            std::vector<std::pair<int, std::string>> assignments;
            std::ostringstream assign_csv;
            assign_csv << "segment,class,type\n";
            for (const auto& [s, cls] : labeled) {
                const int idx = assign_type(s, analysis.final_types);
                assignments.push_back(
                    {cls, analysis.final_types[static_cast<std::size_t>(idx)]
                              .display_name()});
                assign_csv << '"' << s.segment << "\"," << cls << ','
                           << assignments.back().second << '\n';
            }
            const TypeDistribution dist = type_distribution(
                assignments, order, z_axis_from_name(axis_name));
            std::ofstream(ws.reports_dir() / "type-assignments.csv")
                << assign_csv.str();
            std::ofstream(ws.reports_dir() / "type-distribution.csv")
                << dist.to_csv();
            std::ofstream(ws.reports_dir() / "type-distribution.json")
                << dist.to_json() << '\n';
            std::cout << "analyzed " << labeled.size() << " samples into "
                      << analysis.final_types.size() << " types ("
                      << analysis.batches << " batches";
            if (analysis.count_out_of_range) std::cout << ", count out of range";
            std::cout << ")\n" << dist.to_csv();
        } else if (c_run->parsed()) {
            const RunConfig cfg = resolve_config(config_path, ws, true);
            const AggregateReport agg = run_experiment(
                ws, cfg, targets_path, context_path, force);
            std::cout << AggregateReport::csv_header() << "\n"
                      << agg.csv_row(cfg.pipeline_mode) << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

#include "omidet/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "omidet/relations.hpp"
#include "omidet/simulate.hpp"
#include "omidet/text.hpp"

namespace omidet {

namespace fs = std::filesystem;

std::string graph_filename(const std::string& target_id) {
    std::string safe;
    bool changed = false;
    for (char c : target_id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_' ||
                        c == '.';
        safe += ok ? c : '_';
        changed |= !ok;
    }
    if (changed || safe.empty()) {
        // Disambiguate ids that collide after sanitizing.
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%08llx",
                      static_cast<unsigned long long>(fnv1a64(target_id) &
                                                      0xffffffffull));
        safe += std::string("-") + buf;
    }
    return safe + ".json";
}

namespace {

std::shared_ptr<const TextEncoder> workspace_encoder(const Workspace& ws,
                                                     const RunConfig& cfg) {
    auto cache = std::make_shared<EmbeddingCache>(ws.embedding_cache_dir());
    return make_encoder(cfg.encoder, std::move(cache));
}

struct ClientBundle {
    std::shared_ptr<LlmClient> client;
    StubLlmClient* stub = nullptr;  // set when the underlying client is the stub
};

ClientBundle workspace_client(const Workspace& ws, const RunConfig& cfg,
                              std::shared_ptr<LlmClient> override_client) {
    ClientBundle bundle;
    if (override_client) {
        bundle.client = std::move(override_client);
        bundle.stub = dynamic_cast<StubLlmClient*>(bundle.client.get());
        return bundle;
    }
    std::shared_ptr<LlmClient> stub;
    if (cfg.client.kind == LlmClientKind::Stub) {
        stub = std::make_shared<StubLlmClient>();
        bundle.stub = static_cast<StubLlmClient*>(stub.get());
    }
    bundle.client = make_llm_client(cfg.client, ws.llm_cache_dir(), stub);
    return bundle;
}

void write_usage(const Workspace& ws, const MethodUsage& usage) {
    nlohmann::json j;
    j["method"] = usage.method;
    j["items"] = usage.items;
    j["prompt_tokens"] = usage.prompt_tokens;
    j["completion_tokens"] = usage.completion_tokens;
    std::ofstream out(ws.reports_dir() / ("usage-" + usage.method + ".json"));
    if (!out) throw std::runtime_error("cannot write usage record");
    out << j.dump(2) << '\n';
}

Corpus load_ws_corpus(const Workspace& ws, CorpusSchema schema) {
    const fs::path path =
        ws.corpus_dir() /
        (schema == CorpusSchema::Target ? "targets.jsonl" : "context.jsonl");
    return ingest_corpus(path, schema);
}

void require_stage(const Workspace& ws, const std::string& stage,
                   const std::string& hash) {
    if (!ws.stage_complete(stage, hash)) {
        throw std::runtime_error("stage '" + stage +
                                 "' has not run for this configuration; run it "
                                 "first (or use run for the full pipeline)");
    }
}

}  // namespace

std::string environment_hash(const RunConfig& cfg) {
    // Model, training and seed knobs don't affect corpora, environments or
    // annotations; normalize them away so changing them reuses the graphs.
    RunConfig env = cfg;
    env.gnn = GnnConfig{};
    env.fusion = FusionMode::Representation;
    env.joint_base = true;
    env.train = TrainConfig{};
    env.seed = 0;
    env.seeds = {0};
    return config_hash(env);
}

void stage_ingest(const Workspace& ws, const RunConfig& cfg,
                  const fs::path& targets_path, const fs::path& context_path,
                  bool force) {
    ws.ensure_layout();
    const std::string hash = environment_hash(cfg);
    if (!force && ws.stage_complete("ingest", hash)) return;

    const Corpus targets = ingest_corpus(targets_path, CorpusSchema::Target);
    Corpus context;
    if (!context_path.empty()) {
        context = ingest_corpus(context_path, CorpusSchema::Context);
    } else if (cfg.pipeline_mode == "retrieve") {
        throw std::invalid_argument(
            "ingest: retrieve mode needs a context corpus");
    }
    write_corpus(targets, ws.corpus_dir() / "targets.jsonl",
                 CorpusSchema::Target);
    write_corpus(context, ws.corpus_dir() / "context.jsonl",
                 CorpusSchema::Context);

    StageManifest m;
    m.stage = "ingest";
    m.config_hash = hash;
    m.items = static_cast<std::int64_t>(targets.size());
    m.note = std::to_string(context.size()) + " context items";
    ws.write_manifest(m);
}

int stage_build_env(const Workspace& ws, const RunConfig& cfg, bool force) {
    const std::string hash = environment_hash(cfg);
    require_stage(ws, "ingest", hash);
    if (!force && ws.stage_complete("build-env", hash)) {
        return static_cast<int>(ws.read_manifest("build-env")->items);
    }

    const Corpus targets = load_ws_corpus(ws, CorpusSchema::Target);
    const Corpus context = load_ws_corpus(ws, CorpusSchema::Context);
    const auto encoder = workspace_encoder(ws, cfg);
    SegmentStore segments(cfg.max_segments);

    int built = 0;
    for (const NewsItem& target : targets.items()) {
        ContextEnvironment env;
        if (cfg.pipeline_mode == "retrieve") {
            const CandidatePool pool =
                build_candidate_pool(target, context, cfg.t_days);
            env = select_environment(target, pool, cfg.k, *encoder, context);
        } else {
            env.target_id = target.id;
            env.k = cfg.k;
        }
        const OmissionGraph g =
            build_graph(target, env, segments, *encoder, context);
        save_graph(g, ws.graphs_dir() / graph_filename(target.id));
        ++built;
    }

    StageManifest m;
    m.stage = "build-env";
    m.config_hash = hash;
    m.items = built;
    ws.write_manifest(m);
    return built;
}

AnnotateStats stage_annotate(const Workspace& ws, const RunConfig& cfg,
                             bool force,
                             std::shared_ptr<LlmClient> client_override) {
    const std::string hash = environment_hash(cfg);
    require_stage(ws, "build-env", hash);
    AnnotateStats stats;
    if (!force && ws.stage_complete("annotate", hash)) {
        const auto m = ws.read_manifest("annotate");
        stats.items = static_cast<int>(m->items);
        stats.prompt_tokens = m->prompt_tokens;
        stats.completion_tokens = m->completion_tokens;
        return stats;
    }

    const Corpus targets = load_ws_corpus(ws, CorpusSchema::Target);
    const auto encoder = workspace_encoder(ws, cfg);
    ClientBundle bundle = workspace_client(ws, cfg, std::move(client_override));

    for (const NewsItem& target : targets.items()) {
        const fs::path file = graph_filename(target.id);
        OmissionGraph g = load_graph(ws.graphs_dir() / file);
        if (cfg.pipeline_mode == "retrieve") {
            if (bundle.stub) register_stub_environment(*bundle.stub, g);
            const IntentStageResult res = infer_intents(
                g, *bundle.client, cfg.client.model_name, cfg.client.max_parallel);
            apply_intent_annotations(g, res.annotations, *encoder);
            g.degraded = res.degraded;
            g.parse_warnings = res.parse_warnings;
            stats.prompt_tokens += res.prompt_tokens;
            stats.completion_tokens += res.completion_tokens;
            stats.parse_warnings += res.parse_warnings;
            stats.degraded_items += res.degraded ? 1 : 0;
            std::ofstream intents(ws.annotated_dir() /
                                  (file.stem().string() + ".intents.json"));
            intents << intent_stage_to_json(res) << '\n';
        } else {
            const SimMode mode = sim_mode_from_name(cfg.pipeline_mode);
            std::vector<std::string> segs;
            for (int id : g.target_node_ids) {
                segs.push_back(g.nodes[static_cast<std::size_t>(id)].text);
            }
            const SimulationResult sim = simulate_environment(
                segs, *bundle.client, cfg.client.model_name, mode);
            apply_simulation(g, sim, *encoder);
            g.degraded = sim.degraded;
            g.parse_warnings = sim.parse_warnings;
            stats.prompt_tokens += sim.prompt_tokens;
            stats.completion_tokens += sim.completion_tokens;
            stats.parse_warnings += sim.parse_warnings;
            stats.degraded_items += sim.degraded ? 1 : 0;
        }
        save_graph(g, ws.annotated_dir() / file);
        ++stats.items;
    }

    MethodUsage usage;
    usage.method = cfg.pipeline_mode;
    usage.items = stats.items;
    usage.prompt_tokens = stats.prompt_tokens;
    usage.completion_tokens = stats.completion_tokens;
    write_usage(ws, usage);

    StageManifest m;
    m.stage = "annotate";
    m.config_hash = hash;
    m.items = stats.items;
    m.prompt_tokens = stats.prompt_tokens;
    m.completion_tokens = stats.completion_tokens;
    m.note = cfg.pipeline_mode;
    ws.write_manifest(m);
    return stats;
}

Dataset load_dataset(const Workspace& ws, const RunConfig& cfg) {
    require_stage(ws, "annotate", environment_hash(cfg));
    const Corpus targets = load_ws_corpus(ws, CorpusSchema::Target);
    const auto encoder = workspace_encoder(ws, cfg);

    Dataset data;
    for (const NewsItem& target : targets.items()) {
        OmissionGraph g =
            load_graph(ws.annotated_dir() / graph_filename(target.id));
        if (!g.label || !g.split) {
            throw std::runtime_error("graph for " + target.id +
                                     " lacks a label or split");
        }
        Example ex;
        ex.item_id = target.id;
        ex.label = *g.label;
        const Split split = *g.split;
        ex.item_embedding = encoder->encode(target.text);
        ex.graph = std::move(g);
        switch (split) {
            case Split::Train: data.train.push_back(std::move(ex)); break;
            case Split::Val: data.val.push_back(std::move(ex)); break;
            case Split::Test: data.test.push_back(std::move(ex)); break;
        }
    }
    return data;
}

TrainStageResult stage_train(const Workspace& ws, const RunConfig& cfg,
                             bool force) {
    const std::string stage = "train-seed" + std::to_string(cfg.seed);
    const std::string hash = config_hash(cfg);
    TrainStageResult result;
    result.checkpoint =
        ws.train_dir() / ("model-seed" + std::to_string(cfg.seed) + ".ckpt");
    result.history =
        ws.train_dir() / ("history-seed" + std::to_string(cfg.seed) + ".json");
    if (!force && ws.stage_complete(stage, hash) &&
        fs::exists(result.checkpoint)) {
        return result;  // outcome left default: training was skipped
    }

    Dataset data = load_dataset(ws, cfg);
    OmissionModel model(model_config_from(cfg));
    TrainConfig tc = cfg.train;
    tc.seed = cfg.seed;
    result.outcome = train_model(model, data, tc);
    model.save(result.checkpoint, hash);
    std::ofstream hist(result.history);
    if (!hist) throw std::runtime_error("cannot write training history");
    hist << result.outcome.to_json() << '\n';

    StageManifest m;
    m.stage = stage;
    m.config_hash = hash;
    m.items = static_cast<std::int64_t>(data.train.size());
    m.note = "best epoch " + std::to_string(result.outcome.best_epoch);
    ws.write_manifest(m);
    return result;
}

MetricsReport stage_eval(const Workspace& ws, const RunConfig& cfg,
                         const std::string& split, fs::path checkpoint) {
    if (checkpoint.empty()) {
        checkpoint =
            ws.train_dir() / ("model-seed" + std::to_string(cfg.seed) + ".ckpt");
    }
    OmissionModel model(model_config_from(cfg));
    const std::string stored_hash = model.load(checkpoint);
    // A multi-seed run saves one checkpoint per seed; any of the config's
    // seeds is an acceptable provenance, everything else must match.
    bool hash_ok = false;
    std::vector<std::uint64_t> candidates = cfg.seeds;
    candidates.push_back(cfg.seed);
    for (std::uint64_t s : candidates) {
        RunConfig seeded = cfg;
        seeded.seed = s;
        if (stored_hash == config_hash(seeded)) {
            hash_ok = true;
            break;
        }
    }
    if (!hash_ok) {
        throw std::runtime_error(
            "checkpoint " + checkpoint.string() +
            " was trained under a different configuration");
    }

    const Dataset data = load_dataset(ws, cfg);
    const std::vector<Example>* part = nullptr;
    if (split == "train") part = &data.train;
    else if (split == "val") part = &data.val;
    else if (split == "test") part = &data.test;
    else throw std::invalid_argument("eval: unknown split '" + split + "'");

    const auto records = predict_split(model, *part);
    const MetricsReport report = compute_metrics(records, 0.5, split);

    const std::string tag = split + "-seed" + std::to_string(cfg.seed);
    std::ofstream mj(ws.reports_dir() / ("metrics-" + tag + ".json"));
    mj << report.to_json() << '\n';
    std::ofstream pc(ws.reports_dir() / ("predictions-" + tag + ".csv"));
    pc << "item_id,y,y_hat,mode,base_score\n";
    for (const auto& r : records) {
        pc << r.item_id << ',' << r.y << ',' << nlohmann::json(r.y_hat).dump()
           << ',' << r.mode << ',';
        if (r.base_score) pc << nlohmann::json(*r.base_score).dump();
        pc << '\n';
    }
    return report;
}

AggregateReport run_experiment(const Workspace& ws, const RunConfig& cfg,
                               const fs::path& targets_path,
                               const fs::path& context_path, bool force,
                               std::shared_ptr<LlmClient> client_override) {
    WorkspaceLock lock(ws);
    stage_ingest(ws, cfg, targets_path, context_path, force);
    stage_build_env(ws, cfg, force);
    stage_annotate(ws, cfg, force, std::move(client_override));

    std::vector<MetricsReport> per_seed;
    for (std::uint64_t seed : cfg.seeds) {
        RunConfig seeded = cfg;
        seeded.seed = seed;
        stage_train(ws, seeded, force);
        per_seed.push_back(stage_eval(ws, seeded, "test"));
    }

    const AggregateReport agg = aggregate_metrics(per_seed);
    std::ofstream out(ws.reports_dir() / "aggregate-test.json");
    out << agg.to_json() << '\n';
    std::ofstream csv(ws.reports_dir() / "aggregate-test.csv");
    csv << AggregateReport::csv_header() << '\n'
        << agg.csv_row(cfg.pipeline_mode) << '\n';

    StageManifest m;
    m.stage = "run";
    m.config_hash = config_hash(cfg);
    m.items = static_cast<std::int64_t>(cfg.seeds.size());
    m.note = "seeds " + std::to_string(cfg.seeds.size());
    ws.write_manifest(m);
    return agg;
}

CostReport cost_report_from_workspaces(const std::vector<fs::path>& roots) {
    std::vector<MethodUsage> usages;
    std::map<std::string, std::size_t> index;
    for (const auto& root : roots) {
        const fs::path dir = root / "reports";
        if (!fs::exists(dir)) continue;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("usage-", 0) == 0 &&
                entry.path().extension() == ".json") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            std::ifstream in(file);
            std::ostringstream buf;
            buf << in.rdbuf();
            const auto j = nlohmann::json::parse(buf.str());
            MethodUsage u;
            u.method = j.at("method").get<std::string>();
            u.items = j.at("items").get<std::int64_t>();
            u.prompt_tokens = j.at("prompt_tokens").get<std::int64_t>();
            u.completion_tokens = j.at("completion_tokens").get<std::int64_t>();
            const auto it = index.find(u.method);
            if (it == index.end()) {
                index[u.method] = usages.size();
                usages.push_back(std::move(u));
            } else {
                usages[it->second] = std::move(u);
            }
        }
    }
    return make_cost_report(usages);
}

}  // namespace omidet

#include "omidet/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "omidet/text.hpp"

namespace omidet {

namespace {

std::string num(Scalar v) { return nlohmann::json(v).dump(); }

int to_int(const std::string& v) {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
}

std::uint64_t to_u64(const std::string& v) {
    std::size_t used = 0;
    const unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return static_cast<std::uint64_t>(x);
}

Scalar to_scalar(const std::string& v) {
    std::size_t used = 0;
    const Scalar x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
}

bool to_bool(const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw std::invalid_argument("expected true or false");
}

std::vector<std::string> split_commas(const std::string& v) {
    std::vector<std::string> out;
    std::string piece;
    std::istringstream in(v);
    while (std::getline(in, piece, ',')) out.push_back(trim(piece));
    return out;
}

std::string join_u64(const std::vector<std::uint64_t>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(xs[i]);
    }
    return out;
}

std::string join_int(const std::vector<int>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(xs[i]);
    }
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"corpus.max_segments",
         [](RunConfig& c, const std::string& v) { c.max_segments = to_int(v); }},
        {"env.k", [](RunConfig& c, const std::string& v) { c.k = to_int(v); }},
        {"env.t_days",
         [](RunConfig& c, const std::string& v) { c.t_days = to_int(v); }},
        {"encoder.kind",
         [](RunConfig& c, const std::string& v) {
             c.encoder.kind = encoder_kind_from_name(v);
         }},
        {"encoder.dim",
         [](RunConfig& c, const std::string& v) { c.encoder.dimension = to_int(v); }},
        {"encoder.version",
         [](RunConfig& c, const std::string& v) { c.encoder.version = v; }},
        {"client.kind",
         [](RunConfig& c, const std::string& v) {
             c.client.kind = llm_client_kind_from_name(v);
         }},
        {"client.model",
         [](RunConfig& c, const std::string& v) { c.client.model_name = v; }},
        {"client.prompt_version",
         [](RunConfig& c, const std::string& v) { c.client.prompt_version = v; }},
        {"client.max_parallel",
         [](RunConfig& c, const std::string& v) { c.client.max_parallel = to_int(v); }},
        {"client.retry_limit",
         [](RunConfig& c, const std::string& v) { c.client.retry_limit = to_int(v); }},
        {"client.endpoint",
         [](RunConfig& c, const std::string& v) { c.client.endpoint = v; }},
        {"client.api_key_env",
         [](RunConfig& c, const std::string& v) { c.client.api_key_env = v; }},
        {"gnn.d", [](RunConfig& c, const std::string& v) { c.gnn.d = to_int(v); }},
        {"gnn.d_e",
         [](RunConfig& c, const std::string& v) { c.gnn.d_e = to_int(v); }},
        {"gnn.hidden",
         [](RunConfig& c, const std::string& v) {
             c.gnn.hidden.clear();
             for (const auto& piece : split_commas(v)) {
                 c.gnn.hidden.push_back(to_int(piece));
             }
         }},
        {"gnn.layers",
         [](RunConfig& c, const std::string& v) { c.gnn.layers = to_int(v); }},
        {"gnn.scale_attention",
         [](RunConfig& c, const std::string& v) {
             c.gnn.scale_attention = to_bool(v);
         }},
        {"fusion.mode",
         [](RunConfig& c, const std::string& v) {
             c.fusion = fusion_mode_from_name(v);
         }},
        {"fusion.joint_base",
         [](RunConfig& c, const std::string& v) { c.joint_base = to_bool(v); }},
        {"train.batch_size",
         [](RunConfig& c, const std::string& v) { c.train.batch_size = to_int(v); }},
        {"train.learning_rate",
         [](RunConfig& c, const std::string& v) {
             c.train.learning_rate = to_scalar(v);
         }},
        {"train.weight_decay",
         [](RunConfig& c, const std::string& v) {
             c.train.weight_decay = to_scalar(v);
         }},
        {"train.max_epochs",
         [](RunConfig& c, const std::string& v) { c.train.max_epochs = to_int(v); }},
        {"train.patience",
         [](RunConfig& c, const std::string& v) { c.train.patience = to_int(v); }},
        {"pipeline.mode",
         [](RunConfig& c, const std::string& v) { c.pipeline_mode = v; }},
        {"seed", [](RunConfig& c, const std::string& v) { c.seed = to_u64(v); }},
        {"run.seeds",
         [](RunConfig& c, const std::string& v) {
             c.seeds.clear();
             for (const auto& piece : split_commas(v)) {
                 c.seeds.push_back(to_u64(piece));
             }
         }},
    };
    return table;
}

}  // namespace

RunConfig default_run_config() { return RunConfig{}; }

RunConfig parse_run_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key=value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": unknown key '" + key + "'");
        }
        try {
            it->second(cfg, value);
        } catch (const std::exception& e) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": bad value for '" + key +
                                        "': " + e.what());
        }
    }
    validate_run_config(cfg);
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

std::string dump_run_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "corpus.max_segments=" << cfg.max_segments << '\n'
        << "env.k=" << cfg.k << '\n'
        << "env.t_days=" << cfg.t_days << '\n'
        << "encoder.kind=" << encoder_kind_name(cfg.encoder.kind) << '\n'
        << "encoder.dim=" << cfg.encoder.dimension << '\n'
        << "encoder.version=" << cfg.encoder.version << '\n'
        << "client.kind=" << llm_client_kind_name(cfg.client.kind) << '\n'
        << "client.model=" << cfg.client.model_name << '\n'
        << "client.prompt_version=" << cfg.client.prompt_version << '\n'
        << "client.max_parallel=" << cfg.client.max_parallel << '\n'
        << "client.retry_limit=" << cfg.client.retry_limit << '\n'
        << "client.endpoint=" << cfg.client.endpoint << '\n'
        << "client.api_key_env=" << cfg.client.api_key_env << '\n'
        << "gnn.d=" << cfg.gnn.d << '\n'
        << "gnn.d_e=" << cfg.gnn.d_e << '\n'
        << "gnn.hidden=" << join_int(cfg.gnn.hidden) << '\n'
        << "gnn.layers=" << cfg.gnn.layers << '\n'
        << "gnn.scale_attention=" << (cfg.gnn.scale_attention ? "true" : "false")
        << '\n'
        << "fusion.mode=" << fusion_mode_name(cfg.fusion) << '\n'
        << "fusion.joint_base=" << (cfg.joint_base ? "true" : "false") << '\n'
        << "train.batch_size=" << cfg.train.batch_size << '\n'
        << "train.learning_rate=" << num(cfg.train.learning_rate) << '\n'
        << "train.weight_decay=" << num(cfg.train.weight_decay) << '\n'
        << "train.max_epochs=" << cfg.train.max_epochs << '\n'
        << "train.patience=" << cfg.train.patience << '\n'
        << "pipeline.mode=" << cfg.pipeline_mode << '\n'
        << "seed=" << cfg.seed << '\n'
        << "run.seeds=" << join_u64(cfg.seeds) << '\n';
    return out.str();
}

std::string config_hash(const RunConfig& cfg) {
    return sha256_hex(dump_run_config(cfg));
}

void validate_run_config(const RunConfig& cfg) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("config: ") + what);
    };
    require(cfg.max_segments > 0, "corpus.max_segments must be positive");
    require(cfg.k > 0, "env.k must be positive");
    require(cfg.t_days > 0, "env.t_days must be positive");
    require(cfg.encoder.dimension > 0, "encoder.dim must be positive");
    require(cfg.client.max_parallel > 0, "client.max_parallel must be positive");
    require(cfg.client.retry_limit >= 0, "client.retry_limit must be >= 0");
    require(cfg.gnn.d > 0 && cfg.gnn.d_e > 0, "gnn dims must be positive");
    require(cfg.gnn.layers > 0, "gnn.layers must be positive");
    for (int h : cfg.gnn.hidden) {
        require(h > 0, "gnn.hidden entries must be positive");
    }
    require(cfg.train.batch_size > 0, "train.batch_size must be positive");
    require(cfg.train.learning_rate > 0, "train.learning_rate must be positive");
    require(cfg.train.weight_decay >= 0, "train.weight_decay must be >= 0");
    require(cfg.train.max_epochs > 0, "train.max_epochs must be positive");
    require(cfg.train.patience > 0, "train.patience must be positive");
    require(cfg.pipeline_mode == "retrieve" || cfg.pipeline_mode == "sim-zero" ||
                cfg.pipeline_mode == "sim-rule",
            "pipeline.mode must be retrieve, sim-zero or sim-rule");
    require(!cfg.seeds.empty(), "run.seeds must list at least one seed");
}

ModelConfig model_config_from(const RunConfig& cfg) {
    ModelConfig mc;
    mc.d_enc = cfg.encoder.dimension;
    mc.gnn = cfg.gnn;
    mc.fusion = cfg.fusion;
    mc.joint_base = cfg.joint_base;
    mc.seed = cfg.seed;
    return mc;
}

}  // namespace omidet

#include "omidet/workspace.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace omidet {

namespace {

std::filesystem::path manifest_path(const std::filesystem::path& root,
                                    const std::string& stage) {
    return root / (stage + ".manifest.json");
}

}  // namespace

Workspace::Workspace(std::filesystem::path root) : root_(std::move(root)) {
    if (root_.empty()) {
        throw std::invalid_argument("workspace: empty root path");
    }
}

void Workspace::ensure_layout() const {
    namespace fs = std::filesystem;
    fs::create_directories(corpus_dir());
    fs::create_directories(graphs_dir());
    fs::create_directories(annotated_dir());
    fs::create_directories(embedding_cache_dir());
    fs::create_directories(llm_cache_dir());
    fs::create_directories(train_dir());
    fs::create_directories(reports_dir());
}

void Workspace::write_manifest(const StageManifest& m) const {
    nlohmann::json j;
    j["stage"] = m.stage;
    j["config_hash"] = m.config_hash;
    j["items"] = m.items;
    j["prompt_tokens"] = m.prompt_tokens;
    j["completion_tokens"] = m.completion_tokens;
    j["note"] = m.note;
    std::ofstream out(manifest_path(root_, m.stage));
    if (!out) {
        throw std::runtime_error("workspace: cannot write manifest for stage " +
                                 m.stage);
    }
    out << j.dump(2) << '\n';
}

std::optional<StageManifest> Workspace::read_manifest(
    const std::string& stage) const {
    std::ifstream in(manifest_path(root_, stage));
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto j = nlohmann::json::parse(buf.str());
    StageManifest m;
    m.stage = j.at("stage").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.items = j.at("items").get<std::int64_t>();
    m.prompt_tokens = j.at("prompt_tokens").get<std::int64_t>();
    m.completion_tokens = j.at("completion_tokens").get<std::int64_t>();
    m.note = j.value("note", "");
    return m;
}

bool Workspace::stage_complete(const std::string& stage,
                               const std::string& config_hash) const {
    const auto m = read_manifest(stage);
    return m && m->config_hash == config_hash;
}

void Workspace::clear_stage(const std::string& stage) const {
    std::filesystem::remove(manifest_path(root_, stage));
}

WorkspaceLock::WorkspaceLock(const Workspace& ws) : dir_(ws.root() / ".lock") {
    std::error_code ec;
    std::filesystem::create_directories(ws.root(), ec);
    if (!std::filesystem::create_directory(dir_, ec) || ec) {
        throw std::runtime_error(
            "workspace " + ws.root().string() +
            " is locked by another run (remove " + dir_.string() +
            " if that run is gone)");
    }
}

WorkspaceLock::~WorkspaceLock() {
    std::error_code ec;
    std::filesystem::remove(dir_, ec);
}

}  // namespace omidet

#include "omidet/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "omidet/text.hpp"

namespace omidet {

using nlohmann::json;

std::string split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    throw std::logic_error("split_name: bad enum");
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "val") return Split::Val;
    if (name == "test") return Split::Test;
    throw std::invalid_argument("unknown split '" + name + "'");
}

void Corpus::add(NewsItem item) {
    if (index_.count(item.id) != 0) {
        throw std::runtime_error("duplicate item id '" + item.id + "'");
    }
    index_.emplace(item.id, items_.size());
    items_.push_back(std::move(item));
}

const NewsItem& Corpus::get(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
        throw std::runtime_error("unknown item id '" + id + "'");
    }
    return items_[it->second];
}

bool Corpus::contains(const std::string& id) const {
    return index_.count(id) != 0;
}

std::vector<const NewsItem*> Corpus::split_items(Split s) const {
    std::vector<const NewsItem*> out;
    for (const auto& item : items_) {
        if (item.split && *item.split == s) out.push_back(&item);
    }
    return out;
}

namespace {

NewsItem parse_record(const json& rec, CorpusSchema schema, std::size_t line_no) {
    const std::string where = "line " + std::to_string(line_no);
    if (!rec.is_object()) {
        throw std::runtime_error(where + ": record is not an object");
    }
    NewsItem item;
    if (!rec.contains("id") || !rec["id"].is_string()) {
        throw std::runtime_error(where + ": missing string field 'id'");
    }
    item.id = rec["id"].get<std::string>();
    if (!rec.contains("text") || !rec["text"].is_string()) {
        throw std::runtime_error(where + ": missing string field 'text'");
    }
    item.text = rec["text"].get<std::string>();
    if (item.text.empty()) {
        throw std::runtime_error(where + ": empty text");
    }
    if (!rec.contains("timestamp") || !rec["timestamp"].is_number_integer()) {
        throw std::runtime_error(where + ": field 'timestamp' must be an integer");
    }
    item.timestamp = rec["timestamp"].get<std::int64_t>();
    if (rec.contains("language") && rec["language"].is_string()) {
        item.language = rec["language"].get<std::string>();
    }
    if (schema == CorpusSchema::Target) {
        if (!rec.contains("split") || !rec["split"].is_string()) {
            throw std::runtime_error(where + ": target record missing 'split'");
        }
        item.split = split_from_name(rec["split"].get<std::string>());
        if (!rec.contains("label") || !rec["label"].is_number_integer()) {
            throw std::runtime_error(where + ": missing label in labeled split");
        }
        const int label = rec["label"].get<int>();
        if (label != 0 && label != 1) {
            throw std::runtime_error(where + ": label must be 0 or 1");
        }
        item.label = label;
    }
    return item;
}

}  // namespace

Corpus ingest_corpus(const std::filesystem::path& path, CorpusSchema schema) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open corpus file " + path.string());
    }
    Corpus corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": malformed record: " + e.what());
        }
        corpus.add(parse_record(rec, schema, line_no));
    }
    return corpus;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path,
                  CorpusSchema schema) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write corpus file " + path.string());
    }
    for (const auto& item : corpus.items()) {
        json rec{{"id", item.id},
                 {"text", item.text},
                 {"timestamp", item.timestamp},
                 {"language", item.language}};
        if (schema == CorpusSchema::Target) {
            rec["label"] = item.label.value();
            rec["split"] = split_name(item.split.value());
        }
        out << rec.dump() << '\n';
    }
}

namespace {

// Byte length of the terminal mark starting at position i, or 0. Covers
// ASCII . ! ? and the full-width CJK marks.
std::size_t terminal_mark_len(const std::string& text, std::size_t i) {
    const char c = text[i];
    if (c == '.' || c == '!' || c == '?') return 1;
    static const std::string kCjk[] = {"。", "！", "？"};
    for (const auto& mark : kCjk) {
        if (text.compare(i, mark.size(), mark) == 0) return mark.size();
    }
    return 0;
}

}  // namespace

std::vector<Segment> segment_item(const NewsItem& item, int max_segments) {
    if (item.text.empty()) {
        throw std::invalid_argument("segment_item: empty text for '" + item.id + "'");
    }
    if (max_segments < 1) {
        throw std::invalid_argument("segment_item: max_segments must be >= 1");
    }
    const std::string& text = item.text;
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t begin = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '\n') {
            spans.emplace_back(begin, i);
            begin = i + 1;  // the newline itself is a separator
            ++i;
            continue;
        }
        const std::size_t mlen = terminal_mark_len(text, i);
        if (mlen > 0) {
            i += mlen;
            // Swallow a run of consecutive terminal marks as one boundary.
            while (i < text.size()) {
                const std::size_t next = terminal_mark_len(text, i);
                if (next == 0) break;
                i += next;
            }
            spans.emplace_back(begin, i);
            begin = i;
            continue;
        }
        ++i;
    }
    if (begin < text.size()) spans.emplace_back(begin, text.size());

    std::vector<Segment> segments;
    for (const auto& [b, e] : spans) {
        std::string piece = trim(std::string_view(text).substr(b, e - b));
        if (piece.empty()) continue;
        Segment seg;
        seg.parent_id = item.id;
        seg.index = static_cast<int>(segments.size());
        seg.text = std::move(piece);
        seg.span_begin = b;
        seg.span_end = e;
        segments.push_back(std::move(seg));
        if (segments.size() == static_cast<std::size_t>(max_segments)) break;
    }
    if (segments.empty()) {
        // Degenerate text (whitespace-only after split) keeps one segment.
        Segment seg;
        seg.parent_id = item.id;
        seg.index = 0;
        seg.text = trim(text);
        if (seg.text.empty()) seg.text = text;
        seg.span_begin = 0;
        seg.span_end = text.size();
        segments.push_back(std::move(seg));
    }
    return segments;
}

CandidatePool build_candidate_pool(const NewsItem& target,
                                   const Corpus& context_corpus,
                                   int window_days) {
    if (window_days < 1) {
        throw std::invalid_argument("build_candidate_pool: window_days must be >= 1");
    }
    const std::int64_t hi = target.timestamp;
    const std::int64_t lo = hi - static_cast<std::int64_t>(window_days) * 86400;
    CandidatePool pool;
    pool.target_id = target.id;
    pool.window_days = window_days;
    for (const auto& item : context_corpus.items()) {
        if (item.id == target.id) continue;
        if (item.timestamp >= lo && item.timestamp < hi) {
            pool.member_ids.push_back(item.id);
        }
    }
    return pool;
}

const std::vector<Segment>& SegmentStore::segments(const NewsItem& item) {
    auto it = by_id_.find(item.id);
    if (it != by_id_.end()) return it->second;
    auto [ins, ok] = by_id_.emplace(item.id, segment_item(item, max_segments_));
    (void)ok;
    return ins->second;
}

const std::vector<Segment>& SegmentStore::segments_for(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) {
        throw std::runtime_error("SegmentStore: no segments for '" + id + "'");
    }
    return it->second;
}

std::vector<std::string> SegmentStore::texts_for(const std::string& id) const {
    std::vector<std::string> out;
    for (const auto& seg : segments_for(id)) out.push_back(seg.text);
    return out;
}

}  // namespace omidet

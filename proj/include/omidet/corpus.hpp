#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace omidet {

enum class Split { Train, Val, Test };

std::string split_name(Split s);
Split split_from_name(const std::string& name);

struct NewsItem {
    std::string id;
    std::string text;
    std::int64_t timestamp = 0;  // epoch seconds
    std::optional<int> label;    // 0 = real, 1 = fake
    std::optional<Split> split;
    std::string language = "en";
};

struct Segment {
    std::string parent_id;
    int index = 0;
    std::string text;
    std::size_t span_begin = 0;  // byte offsets into the parent text
    std::size_t span_end = 0;
};

struct CandidatePool {
    std::string target_id;
    int window_days = 0;
    std::vector<std::string> member_ids;
};

enum class CorpusSchema { Target, Context };

/// An ingested set of news items with unique ids.
class Corpus {
public:
    void add(NewsItem item);  // throws on duplicate id
    const NewsItem& get(const std::string& id) const;
    bool contains(const std::string& id) const;
    const std::vector<NewsItem>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    std::vector<const NewsItem*> split_items(Split s) const;

private:
    std::vector<NewsItem> items_;
    std::map<std::string, std::size_t> index_;
};

/// Parses a UTF-8 line-delimited corpus file (one JSON object per line).
/// Target schema requires label and split on every record; context records
/// are loaded unlabeled. Malformed lines and duplicate ids are errors that
/// name the offending line or id.
Corpus ingest_corpus(const std::filesystem::path& path, CorpusSchema schema);

void write_corpus(const Corpus& corpus, const std::filesystem::path& path,
                  CorpusSchema schema);

/// Deterministic sentence split on terminal punctuation (. ! ? and the CJK
/// marks) plus newline boundaries. Pieces are whitespace-trimmed, empty
/// pieces dropped, and at most max_segments kept (head truncation).
std::vector<Segment> segment_item(const NewsItem& item, int max_segments);

/// Context items published inside [T_tgt - window_days * 86400, T_tgt).
CandidatePool build_candidate_pool(const NewsItem& target,
                                   const Corpus& context_corpus,
                                   int window_days);

/// Per-item segment lists, computed once and shared by later stages.
class SegmentStore {
public:
    SegmentStore() = default;
    explicit SegmentStore(int max_segments) : max_segments_(max_segments) {}

    const std::vector<Segment>& segments(const NewsItem& item);
    const std::vector<Segment>& segments_for(const std::string& id) const;
    std::vector<std::string> texts_for(const std::string& id) const;
    int max_segments() const { return max_segments_; }

private:
    int max_segments_ = 32;
    std::map<std::string, std::vector<Segment>> by_id_;
};

}  // namespace omidet

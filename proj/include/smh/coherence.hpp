#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace smh {

/// Presence counts over sliding context windows of a reference corpus.
/// A window contributes at most 1 to each word and each unordered pair,
/// regardless of in-window frequency.
class WindowCounts {
public:
    uint32_t window_size = 10;
    uint64_t total_windows = 0;

    uint32_t intern(const std::string& word) {
        auto [it, inserted] = lexicon_.emplace(word, uint32_t(unigram_.size()));
        if (inserted) {
            unigram_.push_back(0);
        }
        return it->second;
    }

    void add_window(std::span<const uint32_t> distinct_ids) {
        ++total_windows;
        for (size_t i = 0; i < distinct_ids.size(); ++i) {
            ++unigram_[distinct_ids[i]];
            for (size_t j = i + 1; j < distinct_ids.size(); ++j) {
                ++pair_[pair_key(distinct_ids[i], distinct_ids[j])];
            }
        }
    }

    uint64_t unigram_count(const std::string& word) const {
        auto it = lexicon_.find(word);
        return it == lexicon_.end() ? 0 : unigram_[it->second];
    }

    uint64_t pair_count(const std::string& a, const std::string& b) const {
        auto ia = lexicon_.find(a);
        auto ib = lexicon_.find(b);
        if (ia == lexicon_.end() || ib == lexicon_.end()) {
            return 0;
        }
        auto it = pair_.find(pair_key(ia->second, ib->second));
        return it == pair_.end() ? 0 : it->second;
    }

private:
    static uint64_t pair_key(uint32_t a, uint32_t b) {
        return uint64_t(std::min(a, b)) << 32 | std::max(a, b);
    }

    std::unordered_map<std::string, uint32_t> lexicon_;
    std::vector<uint64_t> unigram_;
    std::unordered_map<uint64_t, uint64_t> pair_;
};

/// Counts word and pair presences in every contiguous window of exactly
/// window_size tokens; documents shorter than the window yield one window of
/// the whole document. Only words in `filter` are counted (empty filter
/// counts everything); windows still slide over unfiltered tokens.
inline WindowCounts count_windows(std::span<const std::vector<std::string>> docs,
                                  uint32_t window_size,
                                  const std::unordered_set<std::string>& filter) {
    if (window_size < 2) {
        throw std::invalid_argument("window size must be >= 2");
    }
    if (docs.empty()) {
        throw std::runtime_error("empty reference corpus");
    }
    WindowCounts counts;
    counts.window_size = window_size;
    constexpr uint32_t kSkip = UINT32_MAX;
    std::vector<uint32_t> ids;
    std::vector<uint32_t> distinct;
    for (const std::vector<std::string>& tokens : docs) {
        if (tokens.empty()) {
            continue;
        }
        ids.clear();
        ids.reserve(tokens.size());
        for (const std::string& t : tokens) {
            if (filter.empty() || filter.contains(t)) {
                ids.push_back(counts.intern(t));
            } else {
                ids.push_back(kSkip);
            }
        }
        const size_t n = ids.size();
        const size_t n_windows = n <= window_size ? 1 : n - window_size + 1;
        for (size_t start = 0; start < n_windows; ++start) {
            const size_t end = std::min(n, start + window_size);
            distinct.clear();
            for (size_t i = start; i < end; ++i) {
                if (ids[i] != kSkip) {
                    distinct.push_back(ids[i]);
                }
            }
            std::sort(distinct.begin(), distinct.end());
            distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
            counts.add_window(distinct);
        }
    }
    return counts;
}

struct TopicCoherence {
    uint32_t topic_id = 0;
    double npmi = 0.0;
    uint32_t k_used = 0;
    std::vector<std::string> missing_words;  // top words absent from the reference
};

/// Normalized pointwise mutual information of a topic, averaged over the
/// K(K-1)/2 unordered pairs of its top words. Pairs that never co-occur
/// contribute -1; pairs present in every window contribute +1; a word absent
/// from the reference corpus drives all its pairs to -1 and is recorded in
/// missing_words.
inline TopicCoherence npmi_topic(std::span<const std::string> top_words,
                                 const WindowCounts& counts, uint32_t topic_id = 0) {
    if (top_words.size() < 2) {
        throw std::invalid_argument("need at least two words");
    }
    if (counts.total_windows == 0) {
        throw std::runtime_error("empty reference corpus");
    }
    const double total = double(counts.total_windows);
    TopicCoherence result;
    result.topic_id = topic_id;
    result.k_used = uint32_t(top_words.size());
    double sum = 0.0;
    size_t n_pairs = 0;
    for (size_t i = 0; i + 1 < top_words.size(); ++i) {
        for (size_t j = i + 1; j < top_words.size(); ++j) {
            ++n_pairs;
            const uint64_t c_ij = counts.pair_count(top_words[i], top_words[j]);
            if (c_ij == 0) {
                sum += -1.0;
                continue;
            }
            if (c_ij == counts.total_windows) {
                sum += 1.0;  // joint probability 1: the limit of the ratio
                continue;
            }
            const double p_i = double(counts.unigram_count(top_words[i])) / total;
            const double p_j = double(counts.unigram_count(top_words[j])) / total;
            const double p_ij = double(c_ij) / total;
            const double value = std::log(p_ij / (p_i * p_j)) / -std::log(p_ij);
            sum += std::clamp(value, -1.0, 1.0);
        }
    }
    for (const std::string& w : top_words) {
        if (counts.unigram_count(w) == 0) {
            result.missing_words.push_back(w);
        }
    }
    result.npmi = sum / double(n_pairs);
    return result;
}

}  // namespace smh

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "smh/corpus.hpp"
#include "smh/minhash.hpp"

namespace smh {

/// Word ids that landed in one bucket of one table, i.e. words whose inverted
/// file bags share an r-sample tuple. Words are sorted ascending.
struct CoOccurringWordSet {
    uint32_t cws_id = 0;
    std::vector<uint32_t> words;
    uint32_t table_index = 0;
};

struct ClusterParams {
    double overlap_epsilon = 0.9;   // edge iff overlap coefficient strictly above
    uint32_t min_cluster_size = 5;  // clusters with fewer member sets are dropped
    uint32_t min_topic_words = 10;  // topics with fewer words are dropped
    uint32_t top_k_words = 10;      // words used for the topic score

    void validate() const {
        if (!(overlap_epsilon > 0.0 && overlap_epsilon < 1.0)) {
            throw std::invalid_argument("overlap epsilon must be in (0,1)");
        }
    }
};

/// Parameters of the candidate search used to avoid all-pairs overlap checks
/// when clustering. `exact` substitutes exhaustive pair enumeration. With
/// tables == 0, the table count derives from a threshold of 0.7 * epsilon.
struct CandidateSearchParams {
    uint32_t tuple_size = 3;
    uint32_t tables = 0;
    uint64_t seed = 0;
    bool exact = false;
};

struct TopicCluster {
    uint32_t cluster_id = 0;
    std::vector<uint32_t> members;  // cws ids, ascending

    size_t size() const { return members.size(); }
};

struct RankedWord {
    uint32_t word_id = 0;
    uint32_t support = 0;  // member sets containing the word

    friend bool operator==(const RankedWord&, const RankedWord&) = default;
};

struct Topic {
    uint32_t topic_id = 0;
    std::vector<RankedWord> ranked_words;  // descending support, ties by id
    double score = 0.0;                    // mean document frequency of the top words
    uint32_t n_cws = 0;
};

namespace detail {

struct UnionFind {
    std::vector<uint32_t> parent;

    explicit UnionFind(size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0u);
    }

    uint32_t find(uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    void unite(uint32_t a, uint32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
        }
    }
};

inline void collect_cws(const BucketTable& table, uint32_t min_set_size,
                        std::vector<CoOccurringWordSet>& out) {
    std::vector<std::vector<uint32_t>> kept;
    for (const auto& [fp, members] : table.buckets) {
        if (members.size() >= min_set_size) {
            kept.push_back(members);
        }
    }
    // bucket maps are unordered; sort for a deterministic emission order
    std::sort(kept.begin(), kept.end());
    for (std::vector<uint32_t>& words : kept) {
        out.push_back(CoOccurringWordSet{0, std::move(words), table.table_index});
    }
}

}  // namespace detail

/// Mines co-occurring word sets from the inverted file: for every table, each
/// bucket holding at least min_set_size inverted bags becomes one set. Tables
/// are processed one at a time; duplicates across tables are kept since they
/// witness the stability of a word group. With threads > 1 the tables are
/// split across workers, yielding the same output as the serial pass.
inline std::vector<CoOccurringWordSet> extract_cws(std::span<const InvertedFileBag> inverted,
                                                   const SmhParams& params,
                                                   unsigned threads = 0) {
    if (inverted.empty()) {
        throw std::invalid_argument("empty inverted file");
    }
    params.validate();
    std::vector<ItemBag> items;
    items.reserve(inverted.size());
    for (const InvertedFileBag& b : inverted) {
        items.push_back(ItemBag{b.word_id, b.postings});
    }
    const uint32_t l = params.effective_tables();

    std::vector<CoOccurringWordSet> all;
    if (threads <= 1 || l == 1) {
        detail::build_tables_range(items, params, 0, l, [&](const BucketTable& t) {
            detail::collect_cws(t, params.min_set_size, all);
        });
    } else {
        const unsigned n = std::min<unsigned>(threads, l);
        std::vector<std::vector<CoOccurringWordSet>> parts(n);
        std::vector<std::thread> pool;
        pool.reserve(n);
        for (unsigned w = 0; w < n; ++w) {
            const uint32_t lo = uint32_t(uint64_t(l) * w / n);
            const uint32_t hi = uint32_t(uint64_t(l) * (w + 1) / n);
            pool.emplace_back([&items, &params, &parts, w, lo, hi] {
                detail::build_tables_range(items, params, lo, hi, [&](const BucketTable& t) {
                    detail::collect_cws(t, params.min_set_size, parts[w]);
                });
            });
        }
        for (std::thread& th : pool) {
            th.join();
        }
        for (std::vector<CoOccurringWordSet>& part : parts) {
            for (CoOccurringWordSet& c : part) {
                all.push_back(std::move(c));
            }
        }
    }
    for (size_t i = 0; i < all.size(); ++i) {
        all[i].cws_id = uint32_t(i);
    }
    return all;
}

/// |A ∩ B| / min(|A|, |B|) for sorted id sets.
inline double overlap_coefficient(std::span<const uint32_t> a, std::span<const uint32_t> b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("overlap coefficient of an empty set");
    }
    size_t i = 0, j = 0, common = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            ++common;
            ++i;
            ++j;
        }
    }
    return double(common) / double(std::min(a.size(), b.size()));
}

/// Groups the word sets into connected components of the graph whose edges
/// join pairs with overlap coefficient strictly above epsilon. Candidate
/// pairs come from min-hashing the sets (or exhaustive enumeration when
/// exact); every candidate is verified with the exact overlap coefficient, so
/// the probabilistic search can only miss edges, never invent them.
inline std::vector<TopicCluster> cluster_cws(std::span<const CoOccurringWordSet> cws,
                                             const ClusterParams& cluster_params,
                                             const CandidateSearchParams& search) {
    cluster_params.validate();
    if (cws.empty()) {
        throw std::invalid_argument("no word sets to cluster");
    }
    const size_t n = cws.size();
    detail::UnionFind uf(n);
    auto verify = [&](uint32_t i, uint32_t j) {
        if (overlap_coefficient(cws[i].words, cws[j].words) > cluster_params.overlap_epsilon) {
            uf.unite(i, j);
        }
    };

    if (search.exact) {
        for (uint32_t i = 0; i + 1 < n; ++i) {
            for (uint32_t j = i + 1; j < n; ++j) {
                verify(i, j);
            }
        }
    } else {
        std::vector<IdSet> sets(n);
        for (size_t i = 0; i < n; ++i) {
            sets[i] = IdSet{uint32_t(i), cws[i].words};
        }
        const uint32_t tables =
            search.tables != 0
                ? search.tables
                : num_tables(0.7 * cluster_params.overlap_epsilon, search.tuple_size);
        for (const auto& [i, j] : pairwise_candidates(sets, search.tuple_size, tables, search.seed)) {
            verify(i, j);
        }
    }

    std::unordered_map<uint32_t, uint32_t> root_to_cluster;
    std::vector<TopicCluster> clusters;
    for (uint32_t i = 0; i < n; ++i) {
        const uint32_t root = uf.find(i);
        auto [it, inserted] = root_to_cluster.emplace(root, uint32_t(clusters.size()));
        if (inserted) {
            clusters.push_back(TopicCluster{uint32_t(clusters.size()), {}});
        }
        clusters[it->second].members.push_back(cws[i].cws_id);
    }
    return clusters;
}

/// Turns clusters into topics: drops clusters with fewer than min_cluster_size
/// member sets, unions their words ranked by the number of member sets each
/// word appears in, and drops topics with fewer than min_topic_words words.
inline std::vector<Topic> form_topics(std::span<const TopicCluster> clusters,
                                      std::span<const CoOccurringWordSet> cws,
                                      const ClusterParams& params) {
    std::unordered_map<uint32_t, const CoOccurringWordSet*> by_id;
    by_id.reserve(cws.size());
    for (const CoOccurringWordSet& c : cws) {
        by_id.emplace(c.cws_id, &c);
    }
    std::vector<Topic> topics;
    for (const TopicCluster& cluster : clusters) {
        if (cluster.members.size() < params.min_cluster_size) {
            continue;
        }
        std::unordered_map<uint32_t, uint32_t> support;
        for (uint32_t member : cluster.members) {
            auto it = by_id.find(member);
            if (it == by_id.end()) {
                throw std::invalid_argument("cluster references unknown word set");
            }
            for (uint32_t w : it->second->words) {
                ++support[w];
            }
        }
        if (support.size() < params.min_topic_words) {
            continue;
        }
        Topic topic;
        topic.topic_id = uint32_t(topics.size());
        topic.n_cws = uint32_t(cluster.members.size());
        topic.ranked_words.reserve(support.size());
        for (const auto& [w, s] : support) {
            topic.ranked_words.push_back(RankedWord{w, s});
        }
        std::sort(topic.ranked_words.begin(), topic.ranked_words.end(),
                  [](const RankedWord& a, const RankedWord& b) {
                      if (a.support != b.support) {
                          return a.support > b.support;
                      }
                      return a.word_id < b.word_id;
                  });
        topics.push_back(std::move(topic));
    }
    return topics;
}

/// Scores each topic by the mean document frequency of its top_k_words highest
/// ranked words and orders topics by descending score, ties by topic id.
inline std::vector<Topic> rank_topics(std::vector<Topic> topics,
                                      std::span<const uint32_t> doc_frequency,
                                      const ClusterParams& params) {
    for (Topic& t : topics) {
        const size_t k = std::min<size_t>(params.top_k_words, t.ranked_words.size());
        uint64_t sum = 0;
        for (size_t i = 0; i < k; ++i) {
            const uint32_t w = t.ranked_words[i].word_id;
            if (w >= doc_frequency.size()) {
                throw std::out_of_range("word not indexed");
            }
            sum += doc_frequency[w];
        }
        t.score = k == 0 ? 0.0 : double(sum) / double(k);
    }
    std::stable_sort(topics.begin(), topics.end(), [](const Topic& a, const Topic& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.topic_id < b.topic_id;
    });
    return topics;
}

// --- file formats ---------------------------------------------------------
//
// Topics file: "score<TAB>n_cws<TAB>word:support word:support ..." per line,
//              words in rank order, one topic per line in rank order.
// CWS file:    "table_index<TAB>id1 id2 id3 ..." per set (debug dump).

inline void write_topics(std::ostream& out, std::span<const Topic> topics,
                         const Vocabulary& vocab) {
    char buf[32];
    for (const Topic& t : topics) {
        std::snprintf(buf, sizeof(buf), "%.4f", t.score);
        out << buf << '\t' << t.n_cws << '\t';
        for (size_t i = 0; i < t.ranked_words.size(); ++i) {
            if (i) {
                out << ' ';
            }
            out << vocab.word(t.ranked_words[i].word_id) << ':' << t.ranked_words[i].support;
        }
        out << '\n';
    }
}

/// A topic line as parsed back from a topics file; words carry their support.
struct TopicFileEntry {
    double score = 0.0;
    uint32_t n_cws = 0;
    std::vector<std::pair<std::string, uint32_t>> words;
};

inline std::vector<TopicFileEntry> read_topics(std::istream& in) {
    std::vector<TopicFileEntry> topics;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream ss(line);
        TopicFileEntry t;
        if (!(ss >> t.score >> t.n_cws)) {
            throw std::runtime_error("malformed topics line " + std::to_string(line_no));
        }
        std::string item;
        while (ss >> item) {
            const size_t colon = item.rfind(':');
            if (colon == std::string::npos || colon == 0) {
                throw std::runtime_error("malformed topics line " + std::to_string(line_no));
            }
            t.words.emplace_back(item.substr(0, colon),
                                 uint32_t(std::stoul(item.substr(colon + 1))));
        }
        topics.push_back(std::move(t));
    }
    return topics;
}

inline void write_cws(std::ostream& out, std::span<const CoOccurringWordSet> cws) {
    for (const CoOccurringWordSet& c : cws) {
        out << c.table_index << '\t';
        for (size_t i = 0; i < c.words.size(); ++i) {
            if (i) {
                out << ' ';
            }
            out << c.words[i];
        }
        out << '\n';
    }
}

}  // namespace smh

#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "smh/corpus.hpp"
#include "smh/discovery.hpp"
#include "smh/minhash.hpp"

namespace smh {

struct DiscoverConfig {
    SmhParams smh;
    ClusterParams cluster;
    CandidateSearchParams search;  // seed field is ignored: derived from smh.global_seed
    unsigned threads = 0;          // 0 = fully serial reference path
    bool keep_cws = false;
};

struct StageTiming {
    std::string name;
    double seconds = 0.0;
};

struct DiscoveryResult {
    std::vector<Topic> topics;            // ranked
    std::vector<CoOccurringWordSet> cws;  // retained only when keep_cws
    uint64_t cws_count = 0;
    uint64_t cluster_count = 0;
    std::vector<StageTiming> stages;
    double total_seconds = 0.0;
};

/// Runs the discovery pipeline over restricted bags: transpose to the inverted
/// file, mine co-occurring word sets, cluster them by overlap, and form ranked
/// topics. All randomness, including the clustering candidate search, derives
/// from smh.global_seed.
inline DiscoveryResult discover(std::span<const BagOfWords> bags, uint32_t vocab_size,
                                const DiscoverConfig& config) {
    using clock = std::chrono::steady_clock;
    DiscoveryResult result;
    const auto t0 = clock::now();
    auto stage = [&, last = t0](const char* name) mutable {
        const auto now = clock::now();
        result.stages.push_back(
            StageTiming{name, std::chrono::duration<double>(now - last).count()});
        last = now;
    };

    const std::vector<InvertedFileBag> inverted = build_inverted_file(bags, vocab_size);
    std::vector<uint32_t> doc_frequency(vocab_size, 0);
    for (const InvertedFileBag& b : inverted) {
        doc_frequency[b.word_id] = uint32_t(b.postings.size());
    }
    stage("invert");

    std::vector<CoOccurringWordSet> cws = extract_cws(inverted, config.smh, config.threads);
    result.cws_count = cws.size();
    stage("extract");

    CandidateSearchParams search = config.search;
    search.seed = detail::splitmix64(config.smh.global_seed ^ 0x736d682d32000000ull);
    const std::vector<TopicCluster> clusters = cluster_cws(cws, config.cluster, search);
    result.cluster_count = clusters.size();
    stage("cluster");

    std::vector<Topic> topics = form_topics(clusters, cws, config.cluster);
    result.topics = rank_topics(std::move(topics), doc_frequency, config.cluster);
    stage("topics");

    if (config.keep_cws) {
        result.cws = std::move(cws);
    }
    result.total_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    return result;
}

}  // namespace smh

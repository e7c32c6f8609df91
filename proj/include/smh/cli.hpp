#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "smh/coherence.hpp"
#include "smh/corpus.hpp"
#include "smh/discovery.hpp"
#include "smh/pipeline.hpp"
#include "smh/synth.hpp"

namespace smh {

/// Everything a run needs, echoed into a manifest next to the outputs so any
/// run can be reproduced byte-identically with `smh rerun <manifest>`.
struct RunConfig {
    std::string subcommand;

    // paths
    std::string input;      // corpus file (ingest)
    std::string bags;       // bags file (discover)
    std::string vocab;      // vocabulary file (discover)
    std::string topics;     // topics file (evaluate)
    std::string reference;  // reference corpus (evaluate)
    std::string stopwords;  // stopword list, one word per line (ingest)
    std::string output;     // output prefix

    // parameters
    double eta = 0.04;
    uint32_t tuple_size = 2;
    uint32_t tables = 0;  // 0 = derive from (eta, tuple_size)
    double overlap = 0.9;
    uint32_t min_set_size = 3;
    uint32_t min_cluster_size = 5;
    uint32_t min_topic_words = 10;
    uint32_t top_k_words = 10;
    uint32_t vocab_size = 100000;
    uint32_t window_size = 10;
    uint32_t top_n = 400;
    uint64_t seed = 0;
    unsigned threads = 0;
    bool exact_clustering = false;
    bool dump_cws = false;

    // synth parameters
    uint32_t n_topics = 10;
    uint32_t words_per_topic = 20;
    uint32_t n_docs = 1000;
    uint32_t doc_length = 50;
    uint32_t noise_words = 100;
    double noise_fraction = 0.1;
    double zipf = 0.0;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string format_fixed(double v, int digits) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("input not found: " + path);
    }
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write: " + path);
    }
    return out;
}

}  // namespace detail

inline void write_manifest(const std::string& path, const RunConfig& c) {
    auto out = detail::open_output(path);
    out << "subcommand=" << c.subcommand << '\n'
        << "input=" << c.input << '\n'
        << "bags=" << c.bags << '\n'
        << "vocab=" << c.vocab << '\n'
        << "topics=" << c.topics << '\n'
        << "reference=" << c.reference << '\n'
        << "stopwords=" << c.stopwords << '\n'
        << "output=" << c.output << '\n'
        << "eta=" << detail::format_double(c.eta) << '\n'
        << "tuple_size=" << c.tuple_size << '\n'
        << "tables=" << c.tables << '\n'
        << "overlap=" << detail::format_double(c.overlap) << '\n'
        << "min_set_size=" << c.min_set_size << '\n'
        << "min_cluster_size=" << c.min_cluster_size << '\n'
        << "min_topic_words=" << c.min_topic_words << '\n'
        << "top_k_words=" << c.top_k_words << '\n'
        << "vocab_size=" << c.vocab_size << '\n'
        << "window_size=" << c.window_size << '\n'
        << "top_n=" << c.top_n << '\n'
        << "seed=" << c.seed << '\n'
        << "threads=" << c.threads << '\n'
        << "exact_clustering=" << (c.exact_clustering ? 1 : 0) << '\n'
        << "dump_cws=" << (c.dump_cws ? 1 : 0) << '\n'
        << "n_topics=" << c.n_topics << '\n'
        << "words_per_topic=" << c.words_per_topic << '\n'
        << "n_docs=" << c.n_docs << '\n'
        << "doc_length=" << c.doc_length << '\n'
        << "noise_words=" << c.noise_words << '\n'
        << "noise_fraction=" << detail::format_double(c.noise_fraction) << '\n'
        << "zipf=" << detail::format_double(c.zipf) << '\n';
}

inline RunConfig read_manifest(const std::string& path) {
    auto in = detail::open_input(path);
    RunConfig c;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("malformed manifest line " + std::to_string(line_no));
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "subcommand") c.subcommand = value;
        else if (key == "input") c.input = value;
        else if (key == "bags") c.bags = value;
        else if (key == "vocab") c.vocab = value;
        else if (key == "topics") c.topics = value;
        else if (key == "reference") c.reference = value;
        else if (key == "stopwords") c.stopwords = value;
        else if (key == "output") c.output = value;
        else if (key == "eta") c.eta = std::stod(value);
        else if (key == "tuple_size") c.tuple_size = uint32_t(std::stoul(value));
        else if (key == "tables") c.tables = uint32_t(std::stoul(value));
        else if (key == "overlap") c.overlap = std::stod(value);
        else if (key == "min_set_size") c.min_set_size = uint32_t(std::stoul(value));
        else if (key == "min_cluster_size") c.min_cluster_size = uint32_t(std::stoul(value));
        else if (key == "min_topic_words") c.min_topic_words = uint32_t(std::stoul(value));
        else if (key == "top_k_words") c.top_k_words = uint32_t(std::stoul(value));
        else if (key == "vocab_size") c.vocab_size = uint32_t(std::stoul(value));
        else if (key == "window_size") c.window_size = uint32_t(std::stoul(value));
        else if (key == "top_n") c.top_n = uint32_t(std::stoul(value));
        else if (key == "seed") c.seed = std::stoull(value);
        else if (key == "threads") c.threads = unsigned(std::stoul(value));
        else if (key == "exact_clustering") c.exact_clustering = value == "1";
        else if (key == "dump_cws") c.dump_cws = value == "1";
        else if (key == "n_topics") c.n_topics = uint32_t(std::stoul(value));
        else if (key == "words_per_topic") c.words_per_topic = uint32_t(std::stoul(value));
        else if (key == "n_docs") c.n_docs = uint32_t(std::stoul(value));
        else if (key == "doc_length") c.doc_length = uint32_t(std::stoul(value));
        else if (key == "noise_words") c.noise_words = uint32_t(std::stoul(value));
        else if (key == "noise_fraction") c.noise_fraction = std::stod(value);
        else if (key == "zipf") c.zipf = std::stod(value);
        else throw std::runtime_error("unknown manifest key: " + key);
    }
    if (c.subcommand.empty()) {
        throw std::runtime_error("manifest has no subcommand");
    }
    return c;
}

inline int cmd_ingest(const RunConfig& config) {
    try {
        auto in = detail::open_input(config.input);
        std::unordered_set<std::string> stopwords;
        if (!config.stopwords.empty()) {
            auto sw = detail::open_input(config.stopwords);
            std::string word;
            while (sw >> word) {
                stopwords.insert(word);
            }
        }
        const std::vector<TokenizedDoc> docs = read_corpus(in);
        auto [vocab, bags] = ingest(docs, stopwords, config.vocab_size);
        {
            auto out = detail::open_output(config.output + ".bags");
            write_bags(out, bags);
        }
        {
            auto out = detail::open_output(config.output + ".vocab");
            write_vocabulary(out, vocab);
        }
        RunConfig echoed = config;
        echoed.subcommand = "ingest";
        write_manifest(config.output + ".manifest", echoed);
        std::cerr << "ingested " << bags.size() << " documents, vocabulary " << vocab.size()
                  << " words\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

inline int cmd_discover(const RunConfig& config) {
    using clock = std::chrono::steady_clock;
    try {
        const auto t0 = clock::now();

        auto bags_in = detail::open_input(config.bags);
        auto vocab_in = detail::open_input(config.vocab);
        const std::vector<BagOfWords> bags = read_bags(bags_in);
        const Vocabulary vocab = read_vocabulary(vocab_in);
        const double load_seconds =
            std::chrono::duration<double>(clock::now() - t0).count();

        DiscoverConfig dc;
        dc.smh.eta = config.eta;
        dc.smh.tuple_size = config.tuple_size;
        dc.smh.tables = config.tables;
        dc.smh.min_set_size = config.min_set_size;
        dc.smh.global_seed = config.seed;
        dc.cluster.overlap_epsilon = config.overlap;
        dc.cluster.min_cluster_size = config.min_cluster_size;
        dc.cluster.min_topic_words = config.min_topic_words;
        dc.cluster.top_k_words = config.top_k_words;
        dc.search.exact = config.exact_clustering;
        dc.threads = config.threads;
        dc.keep_cws = config.dump_cws;
        dc.smh.validate();
        dc.cluster.validate();

        DiscoveryResult result = discover(bags, uint32_t(vocab.size()), dc);

        const auto t_write = clock::now();
        {
            auto out = detail::open_output(config.output + ".topics");
            write_topics(out, result.topics, vocab);
        }
        if (config.dump_cws) {
            auto out = detail::open_output(config.output + ".cws");
            write_cws(out, result.cws);
        }
        const double write_seconds =
            std::chrono::duration<double>(clock::now() - t_write).count();
        const double total_seconds = std::chrono::duration<double>(clock::now() - t0).count();

        {
            auto out = detail::open_output(config.output + ".stats");
            out << "cws_count=" << result.cws_count << '\n'
                << "cluster_count=" << result.cluster_count << '\n'
                << "topic_count=" << result.topics.size() << '\n';
            out << "stage_seconds.load=" << detail::format_double(load_seconds) << '\n';
            for (const StageTiming& s : result.stages) {
                out << "stage_seconds." << s.name << '=' << detail::format_double(s.seconds)
                    << '\n';
            }
            out << "stage_seconds.write=" << detail::format_double(write_seconds) << '\n'
                << "total_seconds=" << detail::format_double(total_seconds) << '\n';
        }
        RunConfig echoed = config;
        echoed.subcommand = "discover";
        write_manifest(config.output + ".manifest", echoed);
        std::cerr << "discovered " << result.topics.size() << " topics from " << result.cws_count
                  << " word sets in " << detail::format_fixed(total_seconds, 2) << "s\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

inline int cmd_evaluate(const RunConfig& config) {
    try {
        auto topics_in = detail::open_input(config.topics);
        const std::vector<TopicFileEntry> all_topics = read_topics(topics_in);
        if (all_topics.empty()) {
            std::cerr << "error: empty topics file: " << config.topics << '\n';
            return 2;
        }
        auto ref_in = detail::open_input(config.reference);
        const std::vector<TokenizedDoc> ref_docs = read_corpus(ref_in);

        size_t n_eval = config.top_n;
        if (all_topics.size() < n_eval) {
            std::cerr << "warning: only " << all_topics.size() << " topics available, evaluating all\n";
            n_eval = all_topics.size();
        }

        std::vector<std::vector<std::string>> top_words(n_eval);
        std::unordered_set<std::string> filter;
        for (size_t t = 0; t < n_eval; ++t) {
            const size_t k = std::min<size_t>(config.top_k_words, all_topics[t].words.size());
            for (size_t i = 0; i < k; ++i) {
                top_words[t].push_back(all_topics[t].words[i].first);
                filter.insert(all_topics[t].words[i].first);
            }
        }

        std::vector<std::vector<std::string>> ref_tokens;
        ref_tokens.reserve(ref_docs.size());
        for (const TokenizedDoc& d : ref_docs) {
            ref_tokens.push_back(d.tokens);
        }
        const WindowCounts counts = count_windows(ref_tokens, config.window_size, filter);

        std::vector<double> scores;
        scores.reserve(n_eval);
        auto out = detail::open_output(config.output + ".report");
        for (size_t t = 0; t < n_eval; ++t) {
            const TopicCoherence tc = npmi_topic(top_words[t], counts, uint32_t(t));
            for (const std::string& w : tc.missing_words) {
                std::cerr << "warning: topic " << t << ": word '" << w
                          << "' absent from reference corpus\n";
            }
            scores.push_back(tc.npmi);
            out << t << '\t' << detail::format_fixed(tc.npmi, 6) << '\t';
            for (size_t i = 0; i < top_words[t].size(); ++i) {
                if (i) {
                    out << ' ';
                }
                out << top_words[t][i];
            }
            out << '\n';
        }

        std::vector<double> sorted = scores;
        std::sort(sorted.begin(), sorted.end());
        const double mean =
            std::accumulate(sorted.begin(), sorted.end(), 0.0) / double(sorted.size());
        const double median = sorted.size() % 2 == 1
                                  ? sorted[sorted.size() / 2]
                                  : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
        double var = 0.0;
        for (double s : sorted) {
            var += (s - mean) * (s - mean);
        }
        const double stddev = std::sqrt(var / double(sorted.size()));
        out << "summary\tavg=" << detail::format_fixed(mean, 6)
            << "\tmed=" << detail::format_fixed(median, 6)
            << "\tstd=" << detail::format_fixed(stddev, 6) << "\tn=" << sorted.size() << '\n';

        RunConfig echoed = config;
        echoed.subcommand = "evaluate";
        write_manifest(config.output + ".manifest", echoed);
        std::cerr << "evaluated " << n_eval << " topics, mean npmi "
                  << detail::format_fixed(mean, 4) << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

inline int cmd_synth(const RunConfig& config) {
    try {
        PlantedSpec spec;
        spec.n_topics = config.n_topics;
        spec.words_per_topic = config.words_per_topic;
        spec.n_docs = config.n_docs;
        spec.doc_length = config.doc_length;
        spec.noise_words = config.noise_words;
        spec.noise_fraction = config.noise_fraction;
        spec.zipf_exponent = config.zipf;
        spec.seed = config.seed;
        const PlantedCorpus corpus = generate(spec);
        {
            auto out = detail::open_output(config.output + ".corpus");
            write_corpus(out, corpus.docs);
        }
        {
            auto out = detail::open_output(config.output + ".truth");
            write_truth(out, corpus.topic_words);
        }
        RunConfig echoed = config;
        echoed.subcommand = "synth";
        write_manifest(config.output + ".manifest", echoed);
        std::cerr << "generated " << corpus.docs.size() << " documents\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

/// Dispatch used both by the binary and by `rerun <manifest>`.
inline int run_config(const RunConfig& config) {
    if (config.subcommand == "ingest") return cmd_ingest(config);
    if (config.subcommand == "discover") return cmd_discover(config);
    if (config.subcommand == "evaluate") return cmd_evaluate(config);
    if (config.subcommand == "synth") return cmd_synth(config);
    std::cerr << "error: unknown subcommand: " << config.subcommand << '\n';
    return 2;
}

}  // namespace smh

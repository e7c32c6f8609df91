#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "smh/corpus.hpp"

namespace smh {

/// Specification of a synthetic corpus with planted, pairwise-disjoint topic
/// word sets. Serves as recovery ground truth for end-to-end tests.
struct PlantedSpec {
    uint32_t n_topics = 10;
    uint32_t words_per_topic = 20;
    uint32_t n_docs = 1000;
    uint32_t doc_length = 50;
    uint32_t noise_words = 100;
    double noise_fraction = 0.1;
    double zipf_exponent = 0.0;  // 0 = uniform draws within a topic
    uint64_t seed = 0;

    void validate() const {
        if (n_topics < 1 || words_per_topic < 1 || n_docs < 1) {
            throw std::invalid_argument("planted spec fields must be positive");
        }
        if (doc_length < 5) {
            throw std::invalid_argument("doc length must be >= 5");
        }
        if (!(noise_fraction >= 0.0 && noise_fraction < 1.0)) {
            throw std::invalid_argument("noise fraction must be in [0,1)");
        }
        if (noise_fraction > 0.0 && noise_words == 0) {
            throw std::invalid_argument("noise fraction requires noise words");
        }
        if (zipf_exponent < 0.0) {
            throw std::invalid_argument("zipf exponent must be >= 0");
        }
    }
};

struct PlantedCorpus {
    std::vector<TokenizedDoc> docs;
    std::vector<std::vector<std::string>> topic_words;  // ground truth, disjoint
    std::vector<uint32_t> doc_topic;                    // planted topic per document
};

namespace detail {

// rejection sampling keeps the draw unbiased and independent of the standard
// library's distribution implementations
inline uint64_t uniform_below(std::mt19937_64& rng, uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

inline double uniform_unit(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Generates the corpus: each document picks one planted topic uniformly,
/// draws (1 - noise_fraction) of its tokens from that topic's word set (with
/// replacement, uniform or Zipf-weighted) and the rest from the shared noise
/// vocabulary.
inline PlantedCorpus generate(const PlantedSpec& spec) {
    spec.validate();
    PlantedCorpus corpus;
    corpus.topic_words.resize(spec.n_topics);
    for (uint32_t t = 0; t < spec.n_topics; ++t) {
        for (uint32_t w = 0; w < spec.words_per_topic; ++w) {
            corpus.topic_words[t].push_back("t" + std::to_string(t) + "w" + std::to_string(w));
        }
    }
    std::vector<std::string> noise;
    noise.reserve(spec.noise_words);
    for (uint32_t w = 0; w < spec.noise_words; ++w) {
        noise.push_back("nz" + std::to_string(w));
    }

    std::vector<double> zipf_cdf;
    if (spec.zipf_exponent > 0.0) {
        zipf_cdf.resize(spec.words_per_topic);
        double acc = 0.0;
        for (uint32_t i = 0; i < spec.words_per_topic; ++i) {
            acc += 1.0 / std::pow(double(i + 1), spec.zipf_exponent);
            zipf_cdf[i] = acc;
        }
        for (double& c : zipf_cdf) {
            c /= acc;
        }
    }

    std::mt19937_64 rng(spec.seed);
    auto draw_topic_word = [&](uint32_t topic) -> const std::string& {
        if (zipf_cdf.empty()) {
            return corpus.topic_words[topic][detail::uniform_below(rng, spec.words_per_topic)];
        }
        const double u = detail::uniform_unit(rng);
        const size_t i = std::lower_bound(zipf_cdf.begin(), zipf_cdf.end(), u) - zipf_cdf.begin();
        return corpus.topic_words[topic][std::min<size_t>(i, spec.words_per_topic - 1)];
    };

    const uint32_t n_noise_tokens = uint32_t(std::lround(spec.noise_fraction * spec.doc_length));
    const uint32_t n_topic_tokens = spec.doc_length - n_noise_tokens;
    corpus.docs.reserve(spec.n_docs);
    corpus.doc_topic.reserve(spec.n_docs);
    for (uint32_t d = 0; d < spec.n_docs; ++d) {
        const uint32_t topic = uint32_t(detail::uniform_below(rng, spec.n_topics));
        TokenizedDoc doc;
        doc.id = std::to_string(d);
        doc.tokens.reserve(spec.doc_length);
        for (uint32_t i = 0; i < n_topic_tokens; ++i) {
            doc.tokens.push_back(draw_topic_word(topic));
        }
        for (uint32_t i = 0; i < n_noise_tokens; ++i) {
            doc.tokens.push_back(noise[detail::uniform_below(rng, spec.noise_words)]);
        }
        corpus.docs.push_back(std::move(doc));
        corpus.doc_topic.push_back(topic);
    }
    return corpus;
}

/// Ground truth file: one line per planted topic, "topic_id<TAB>word word ...".
inline void write_truth(std::ostream& out, std::span<const std::vector<std::string>> topic_words) {
    for (size_t t = 0; t < topic_words.size(); ++t) {
        out << t << '\t';
        for (size_t i = 0; i < topic_words[t].size(); ++i) {
            if (i) {
                out << ' ';
            }
            out << topic_words[t][i];
        }
        out << '\n';
    }
}

}  // namespace smh

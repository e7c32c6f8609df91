#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "smh/minhash.hpp"

namespace smh {

/// A document as read from a corpus file: an external id and its tokens.
/// Tokens are expected to be preprocessed (lowercased, lemmatized) upstream.
struct TokenizedDoc {
    std::string id;
    std::vector<std::string> tokens;
};

struct VocabEntry {
    std::string word;
    uint32_t word_id = 0;
    uint64_t corpus_frequency = 0;
    uint32_t document_frequency = 0;
};

/// The restricted vocabulary: entries indexed by word id, ordered by
/// descending corpus frequency with lexicographic tie-break.
class Vocabulary {
public:
    Vocabulary() = default;

    static Vocabulary from_entries(std::vector<VocabEntry> entries) {
        Vocabulary v;
        v.entries_ = std::move(entries);
        v.index_.reserve(v.entries_.size());
        for (size_t i = 0; i < v.entries_.size(); ++i) {
            const VocabEntry& e = v.entries_[i];
            if (e.word_id != i) {
                throw std::invalid_argument("vocabulary ids must be dense and ordered");
            }
            if (e.document_frequency == 0 || e.corpus_frequency < e.document_frequency) {
                throw std::invalid_argument("vocabulary frequencies are inconsistent");
            }
            if (!v.index_.emplace(e.word, uint32_t(i)).second) {
                throw std::invalid_argument("duplicate word in vocabulary: " + e.word);
            }
        }
        return v;
    }

    size_t size() const { return entries_.size(); }
    const std::vector<VocabEntry>& entries() const { return entries_; }
    const std::string& word(uint32_t id) const { return entries_.at(id).word; }

    const VocabEntry* find(const std::string& w) const {
        auto it = index_.find(w);
        return it == index_.end() ? nullptr : &entries_[it->second];
    }

private:
    std::vector<VocabEntry> entries_;
    std::unordered_map<std::string, uint32_t> index_;
};

/// A document restricted to the vocabulary: word id -> multiplicity, kept as
/// entries sorted by ascending id. Documents with no vocabulary words keep an
/// empty term list so document indices stay stable.
struct BagOfWords {
    uint32_t doc_id = 0;  // dense document index, 0..N-1 in corpus order
    std::vector<BagEntry> terms;
};

/// The occurrence pattern of one word: document index -> in-document
/// frequency, sorted by document index.
struct InvertedFileBag {
    uint32_t word_id = 0;
    std::vector<BagEntry> postings;
    uint32_t max_multiplicity = 0;
};

/// Builds the vocabulary of the `vocab_size` most frequent non-stopword tokens
/// and the per-document bags restricted to it. Frequency ties at the cutoff
/// break lexicographically so builds are deterministic.
inline std::pair<Vocabulary, std::vector<BagOfWords>> ingest(
    std::span<const TokenizedDoc> docs, const std::unordered_set<std::string>& stopwords,
    uint32_t vocab_size) {
    if (vocab_size < 1) {
        throw std::invalid_argument("vocab size must be >= 1");
    }
    if (docs.empty()) {
        throw std::runtime_error("empty corpus");
    }
    {
        std::unordered_set<std::string> ids;
        ids.reserve(docs.size());
        for (const TokenizedDoc& d : docs) {
            if (!ids.insert(d.id).second) {
                throw std::invalid_argument("duplicate doc_id: " + d.id);
            }
        }
    }

    struct Freq {
        uint64_t corpus = 0;
        uint32_t documents = 0;
    };
    std::unordered_map<std::string, Freq> freq;
    std::unordered_map<std::string, uint32_t> doc_counts;
    for (const TokenizedDoc& d : docs) {
        doc_counts.clear();
        for (const std::string& t : d.tokens) {
            if (!stopwords.contains(t)) {
                ++doc_counts[t];
            }
        }
        for (const auto& [token, n] : doc_counts) {
            Freq& f = freq[token];
            f.corpus += n;
            f.documents += 1;
        }
    }
    if (freq.empty()) {
        throw std::runtime_error("empty corpus after filtering");
    }

    std::vector<VocabEntry> entries;
    entries.reserve(freq.size());
    for (const auto& [token, f] : freq) {
        entries.push_back(VocabEntry{token, 0, f.corpus, f.documents});
    }
    std::sort(entries.begin(), entries.end(), [](const VocabEntry& a, const VocabEntry& b) {
        if (a.corpus_frequency != b.corpus_frequency) {
            return a.corpus_frequency > b.corpus_frequency;
        }
        return a.word < b.word;
    });
    if (entries.size() > vocab_size) {
        entries.resize(vocab_size);
    }
    for (size_t i = 0; i < entries.size(); ++i) {
        entries[i].word_id = uint32_t(i);
    }
    Vocabulary vocab = Vocabulary::from_entries(std::move(entries));

    std::vector<BagOfWords> bags;
    bags.reserve(docs.size());
    for (size_t d = 0; d < docs.size(); ++d) {
        doc_counts.clear();
        for (const std::string& t : docs[d].tokens) {
            if (!stopwords.contains(t)) {
                ++doc_counts[t];
            }
        }
        BagOfWords bag;
        bag.doc_id = uint32_t(d);
        for (const auto& [token, n] : doc_counts) {
            if (const VocabEntry* e = vocab.find(token)) {
                bag.terms.push_back(BagEntry{e->word_id, n});
            }
        }
        std::sort(bag.terms.begin(), bag.terms.end(),
                  [](const BagEntry& a, const BagEntry& b) { return a.id < b.id; });
        bags.push_back(std::move(bag));
    }
    return {std::move(vocab), std::move(bags)};
}

/// Exact transpose of the bags: postings[word][doc] = bags[doc].terms[word].
/// Words with no occurrences produce no inverted bag. Output is sorted by
/// word id, postings by document index.
inline std::vector<InvertedFileBag> build_inverted_file(std::span<const BagOfWords> bags,
                                                        uint32_t vocab_size) {
    std::vector<std::vector<BagEntry>> postings(vocab_size);
    for (const BagOfWords& bag : bags) {
        for (const BagEntry& term : bag.terms) {
            if (term.id >= vocab_size) {
                throw std::invalid_argument("word id out of vocabulary range");
            }
            postings[term.id].push_back(BagEntry{bag.doc_id, term.count});
        }
    }
    std::vector<InvertedFileBag> inverted;
    for (uint32_t w = 0; w < vocab_size; ++w) {
        if (postings[w].empty()) {
            continue;
        }
        InvertedFileBag b;
        b.word_id = w;
        b.postings = std::move(postings[w]);
        for (const BagEntry& p : b.postings) {
            b.max_multiplicity = std::max(b.max_multiplicity, p.count);
        }
        inverted.push_back(std::move(b));
    }
    return inverted;
}

/// Number of documents a word occurs in. The inverted file must be sorted by
/// word id (as build_inverted_file produces it).
inline uint32_t document_frequency(uint32_t word_id, std::span<const InvertedFileBag> inverted) {
    auto it = std::lower_bound(
        inverted.begin(), inverted.end(), word_id,
        [](const InvertedFileBag& b, uint32_t id) { return b.word_id < id; });
    if (it == inverted.end() || it->word_id != word_id) {
        throw std::out_of_range("word not indexed");
    }
    return uint32_t(it->postings.size());
}

// --- file formats ---------------------------------------------------------
//
// Corpus file:     one document per line, "doc_id<TAB>token token ...".
// Bags file:       one document per line, "n id1:f1 id2:f2 ..." with ids
//                  ascending; the document index is the line number.
// Vocabulary file: "word<TAB>word_id<TAB>corpus_frequency<TAB>document_frequency".

inline std::vector<TokenizedDoc> read_corpus(std::istream& in) {
    std::vector<TokenizedDoc> docs;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error("malformed corpus line " + std::to_string(line_no) +
                                     ": missing doc_id field");
        }
        TokenizedDoc doc;
        doc.id = line.substr(0, tab);
        std::istringstream rest(line.substr(tab + 1));
        std::string token;
        while (rest >> token) {
            doc.tokens.push_back(std::move(token));
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

inline void write_corpus(std::ostream& out, std::span<const TokenizedDoc> docs) {
    for (const TokenizedDoc& d : docs) {
        out << d.id << '\t';
        for (size_t i = 0; i < d.tokens.size(); ++i) {
            if (i) {
                out << ' ';
            }
            out << d.tokens[i];
        }
        out << '\n';
    }
}

inline void write_bags(std::ostream& out, std::span<const BagOfWords> bags) {
    for (const BagOfWords& bag : bags) {
        out << bag.terms.size();
        for (const BagEntry& t : bag.terms) {
            out << ' ' << t.id << ':' << t.count;
        }
        out << '\n';
    }
}

inline std::vector<BagOfWords> read_bags(std::istream& in) {
    std::vector<BagOfWords> bags;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        size_t n = 0;
        if (!(ss >> n)) {
            throw std::runtime_error("malformed bags line " + std::to_string(line_no));
        }
        BagOfWords bag;
        bag.doc_id = uint32_t(bags.size());
        bag.terms.reserve(n);
        for (size_t i = 0; i < n; ++i) {
            uint32_t id = 0, count = 0;
            char colon = 0;
            if (!(ss >> id >> colon >> count) || colon != ':' || count == 0) {
                throw std::runtime_error("malformed bags line " + std::to_string(line_no));
            }
            if (!bag.terms.empty() && bag.terms.back().id >= id) {
                throw std::runtime_error("bags line " + std::to_string(line_no) +
                                         ": ids must be ascending");
            }
            bag.terms.push_back(BagEntry{id, count});
        }
        bags.push_back(std::move(bag));
    }
    return bags;
}

inline void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
    for (const VocabEntry& e : vocab.entries()) {
        out << e.word << '\t' << e.word_id << '\t' << e.corpus_frequency << '\t'
            << e.document_frequency << '\n';
    }
}

inline Vocabulary read_vocabulary(std::istream& in) {
    std::vector<VocabEntry> entries;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream ss(line);
        VocabEntry e;
        if (!(std::getline(ss, e.word, '\t') && ss >> e.word_id >> e.corpus_frequency >>
              e.document_frequency)) {
            throw std::runtime_error("malformed vocabulary line " + std::to_string(line_no));
        }
        entries.push_back(std::move(e));
    }
    return Vocabulary::from_entries(std::move(entries));
}

}  // namespace smh

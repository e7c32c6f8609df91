// smh: topic discovery by min-hashing co-occurring word sets.
//
// Pipeline: synth (optional) -> ingest -> discover -> evaluate. Every run
// writes a manifest next to its outputs; `smh rerun <manifest>` reproduces a
// run byte-identically.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "smh/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Topic discovery by min-hashing co-occurring word sets"};
    app.require_subcommand(1);
    smh::RunConfig cfg;
    std::string manifest_path;

    auto* ingest = app.add_subcommand("ingest", "Build bags and vocabulary from a corpus file");
    ingest->add_option("--input", cfg.input, "corpus file, one 'doc_id<TAB>tokens' per line")
        ->required();
    ingest->add_option("--output", cfg.output, "output prefix (.bags, .vocab)")->required();
    ingest->add_option("--vocab-size", cfg.vocab_size, "keep the D most frequent words");
    ingest->add_option("--stopwords", cfg.stopwords, "stopword list, one word per line");

    auto* discover = app.add_subcommand("discover", "Mine topics from bags + vocabulary");
    discover->add_option("--bags", cfg.bags, "bags file from ingest")->required();
    discover->add_option("--vocab", cfg.vocab, "vocabulary file from ingest")->required();
    discover->add_option("--output", cfg.output, "output prefix (.topics, .stats)")->required();
    discover->add_option("--eta", cfg.eta, "co-occurrence threshold in (0,1)");
    discover->add_option("--tuple-size", cfg.tuple_size, "samples per bucket key (r)");
    discover->add_option("--tables", cfg.tables, "hash table count override (0 = derive)");
    discover->add_option("--overlap", cfg.overlap, "clustering overlap threshold in (0,1)");
    discover->add_option("--min-set-size", cfg.min_set_size, "minimum words per mined set");
    discover->add_option("--min-cluster-size", cfg.min_cluster_size,
                         "minimum sets per kept cluster");
    discover->add_option("--min-topic-words", cfg.min_topic_words, "minimum words per topic");
    discover->add_option("--top-k-words", cfg.top_k_words, "words used for topic scores");
    discover->add_option("--seed", cfg.seed, "seed for all randomness");
    discover->add_option("--threads", cfg.threads, "worker threads (0 = serial timing mode)");
    discover->add_flag("--exact-clustering", cfg.exact_clustering,
                       "verify all set pairs instead of min-hash candidates");
    discover->add_flag("--dump-cws", cfg.dump_cws, "also write the mined word sets (.cws)");

    auto* evaluate = app.add_subcommand("evaluate", "Score topic coherence against a reference");
    evaluate->add_option("--topics", cfg.topics, "topics file from discover")->required();
    evaluate->add_option("--reference", cfg.reference, "reference corpus file")->required();
    evaluate->add_option("--output", cfg.output, "output prefix (.report)")->required();
    evaluate->add_option("--window-size", cfg.window_size, "sliding window length");
    evaluate->add_option("--top-n", cfg.top_n, "number of top-ranked topics to evaluate");
    evaluate->add_option("--top-k-words", cfg.top_k_words, "top words per topic to score");

    auto* synth = app.add_subcommand("synth", "Generate a planted-topic corpus");
    synth->add_option("--output", cfg.output, "output prefix (.corpus, .truth)")->required();
    synth->add_option("--n-topics", cfg.n_topics, "planted topic count");
    synth->add_option("--words-per-topic", cfg.words_per_topic, "words per planted topic");
    synth->add_option("--n-docs", cfg.n_docs, "document count");
    synth->add_option("--doc-length", cfg.doc_length, "tokens per document");
    synth->add_option("--noise-words", cfg.noise_words, "shared noise vocabulary size");
    synth->add_option("--noise-fraction", cfg.noise_fraction, "fraction of noise tokens");
    synth->add_option("--zipf", cfg.zipf, "Zipf exponent for in-topic draws (0 = uniform)");
    synth->add_option("--seed", cfg.seed, "generator seed");

    auto* rerun = app.add_subcommand("rerun", "Re-execute a run from its manifest");
    rerun->add_option("manifest", manifest_path, "manifest file")->required();

    CLI11_PARSE(app, argc, argv);

    if (rerun->parsed()) {
        try {
            return smh::run_config(smh::read_manifest(manifest_path));
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 2;
        }
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    return smh::run_config(cfg);
}

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace smh {

/// One element of an integer bag: an id together with its positive multiplicity.
/// Bags are kept as vectors of entries sorted by ascending id.
struct BagEntry {
    uint32_t id = 0;
    uint32_t count = 0;

    friend bool operator==(const BagEntry&, const BagEntry&) = default;
};

using BagView = std::span<const BagEntry>;

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Identifies one of the M hash functions of a run. The same
/// (global_seed, function_index) pair always produces the same keyed draws,
/// independent of platform.
struct HashFunctionSpec {
    uint64_t global_seed = 0;
    uint32_t function_index = 0;

    uint64_t key() const {
        return detail::splitmix64(global_seed ^
                                  (0x9e3779b97f4a7c15ull * (uint64_t(function_index) + 1)));
    }
};

/// Keyed pseudo-random draw for the unit (element, z) under one hash function.
/// Distinct (function, element, unit) triples give independent 64-bit values;
/// equal triples always give the same value, which is what makes the sampling
/// consistent across bags.
inline uint64_t sample_draw(uint64_t function_key, uint32_t element, uint32_t unit) {
    return detail::splitmix64(detail::splitmix64(function_key ^ element) ^ unit);
}

/// A consistent sample from a bag: the element and the sampled unit z,
/// 1 <= z <= multiplicity of the element in the source bag.
struct Sample {
    uint32_t element = 0;
    uint32_t unit = 0;

    friend bool operator==(const Sample&, const Sample&) = default;
    friend auto operator<=>(const Sample&, const Sample&) = default;
};

struct MinHashSignature {
    std::vector<Sample> values;  // one sample per hash function
};

/// Number of hash tables l such that bags at the co-occurrence threshold eta
/// collide in at least one table with probability ~0.5 for tuple size r:
/// l = floor(log(0.5) / log(1 - eta^r)), at least 1.
inline uint32_t num_tables(double eta, uint32_t r) {
    if (!(eta > 0.0 && eta < 1.0)) {
        throw std::invalid_argument("eta must be in (0,1)");
    }
    if (r < 1) {
        throw std::invalid_argument("tuple size must be >= 1");
    }
    const double p = std::pow(eta, double(r));
    const double l = std::log(0.5) / std::log1p(-p);
    if (!(l >= 1.0)) {
        return 1;
    }
    return static_cast<uint32_t>(l);
}

/// Probability that bags with the given co-occurrence coefficient share at
/// least one of l tuples of size r: 1 - (1 - jcc^r)^l.
inline double collision_probability(double jcc, uint32_t r, uint32_t l) {
    return 1.0 - std::pow(1.0 - std::pow(jcc, double(r)), double(l));
}

/// Jaccard similarity of two integer bags: sum of per-element minima over
/// sum of per-element maxima. Two empty bags compare equal, so 1.0.
inline double jaccard_bag(BagView a, BagView b) {
    uint64_t min_sum = 0;
    uint64_t max_sum = 0;
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a[i].id < b[j].id)) {
            max_sum += a[i].count;
            ++i;
        } else if (i == a.size() || b[j].id < a[i].id) {
            max_sum += b[j].count;
            ++j;
        } else {
            min_sum += std::min(a[i].count, b[j].count);
            max_sum += std::max(a[i].count, b[j].count);
            ++i;
            ++j;
        }
    }
    if (max_sum == 0) {
        return 1.0;
    }
    return double(min_sum) / double(max_sum);
}

/// Co-occurrence coefficient of k >= 2 bags: sum over elements of the minimum
/// multiplicity across all bags divided by the sum of the maximum. Equals
/// jaccard_bag for k = 2.
inline double jcc_bags(std::span<const BagView> bags) {
    if (bags.size() < 2) {
        throw std::invalid_argument("need at least two bags");
    }
    std::vector<size_t> pos(bags.size(), 0);
    uint64_t min_sum = 0;
    uint64_t max_sum = 0;
    for (;;) {
        uint32_t next = UINT32_MAX;
        bool any = false;
        for (size_t k = 0; k < bags.size(); ++k) {
            if (pos[k] < bags[k].size()) {
                next = any ? std::min(next, bags[k][pos[k]].id) : bags[k][pos[k]].id;
                any = true;
            }
        }
        if (!any) {
            break;
        }
        uint32_t mn = UINT32_MAX;
        uint32_t mx = 0;
        for (size_t k = 0; k < bags.size(); ++k) {
            uint32_t c = 0;
            if (pos[k] < bags[k].size() && bags[k][pos[k]].id == next) {
                c = bags[k][pos[k]].count;
                ++pos[k];
            }
            mn = std::min(mn, c);
            mx = std::max(mx, c);
        }
        min_sum += mn;
        max_sum += mx;
    }
    if (max_sum == 0) {
        return 1.0;
    }
    return double(min_sum) / double(max_sum);
}

/// The consistent sample of a bag under one hash function: the (element, unit)
/// pair minimizing the keyed draw over all units z = 1..count of every entry.
/// Ties on the draw value break toward the smaller (element, unit) pair.
inline Sample min_sample(BagView bag, uint64_t function_key) {
    uint64_t best = 0;
    Sample out{};
    bool found = false;
    for (const BagEntry& e : bag) {
        const uint64_t element_key = detail::splitmix64(function_key ^ e.id);
        for (uint32_t z = 1; z <= e.count; ++z) {
            const uint64_t d = detail::splitmix64(element_key ^ z);
            if (!found || d < best ||
                (d == best && Sample{e.id, z} < out)) {
                best = d;
                out = Sample{e.id, z};
                found = true;
            }
        }
    }
    if (!found) {
        throw std::invalid_argument("cannot hash empty bag");
    }
    return out;
}

/// Signature of num_hashes consistent samples. Sampling the same bag with the
/// same seed is reproducible; nested bags agree on every sample whose unit
/// lies within the smaller bag's multiplicity.
inline MinHashSignature minhash_signature(BagView bag, uint32_t num_hashes, uint64_t global_seed) {
    MinHashSignature sig;
    sig.values.reserve(num_hashes);
    for (uint32_t m = 0; m < num_hashes; ++m) {
        sig.values.push_back(min_sample(bag, HashFunctionSpec{global_seed, m}.key()));
    }
    return sig;
}

struct SmhParams {
    double eta = 0.04;        // co-occurrence threshold of the collision filter
    uint32_t tuple_size = 2;  // r: samples concatenated into one bucket key
    uint32_t tables = 0;      // l override; 0 derives from (eta, tuple_size)
    uint32_t min_set_size = 3;
    uint64_t global_seed = 0;

    uint32_t effective_tables() const {
        return tables != 0 ? tables : num_tables(eta, tuple_size);
    }

    void validate() const {
        if (tuple_size < 1) {
            throw std::invalid_argument("tuple size must be >= 1");
        }
        if (tables == 0 && !(eta > 0.0 && eta < 1.0)) {
            throw std::invalid_argument("eta must be in (0,1)");
        }
        if (min_set_size < 1) {
            throw std::invalid_argument("min set size must be >= 1");
        }
    }
};

/// 128-bit fingerprint of an ordered tuple of samples, used as the bucket key.
/// Collisions between distinct tuples are negligible at this width, so full
/// tuples need not be stored.
struct Fingerprint {
    uint64_t hi = 0;
    uint64_t lo = 0;

    friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

struct FingerprintHash {
    size_t operator()(const Fingerprint& f) const noexcept { return size_t(f.lo); }
};

inline Fingerprint tuple_fingerprint(std::span<const Sample> tuple) {
    uint64_t a = 0x243f6a8885a308d3ull;
    uint64_t b = 0x452821e638d01377ull;
    for (const Sample& s : tuple) {
        a = detail::splitmix64(a ^ s.element);
        a = detail::splitmix64(a ^ s.unit);
        b = detail::splitmix64(b ^ a);
    }
    return Fingerprint{a, b};
}

/// An item to be stored in the hash tables: an id plus a view of its bag.
struct ItemBag {
    uint32_t id = 0;
    BagView bag;
};

/// One hash table: items grouped by the fingerprint of their r-sample tuple.
struct BucketTable {
    uint32_t table_index = 0;
    std::unordered_map<Fingerprint, std::vector<uint32_t>, FingerprintHash> buckets;
};

namespace detail {

template <class Sink>
void build_tables_range(std::span<const ItemBag> items, const SmhParams& params,
                        uint32_t first_table, uint32_t last_table, Sink&& sink) {
    std::vector<Sample> tuple(params.tuple_size);
    for (uint32_t x = first_table; x < last_table; ++x) {
        BucketTable table;
        table.table_index = x;
        table.buckets.reserve(items.size());
        for (const ItemBag& item : items) {
            for (uint32_t q = 0; q < params.tuple_size; ++q) {
                const HashFunctionSpec fn{params.global_seed, x * params.tuple_size + q};
                tuple[q] = min_sample(item.bag, fn.key());
            }
            table.buckets[tuple_fingerprint(tuple)].push_back(item.id);
        }
        sink(table);
    }
}

}  // namespace detail

/// Builds the l hash tables one at a time and hands each to the sink; table x
/// uses hash functions x*r .. x*r+r-1. Only one table is alive at any moment,
/// which bounds memory independently of l.
template <class Sink>
void build_tables(std::span<const ItemBag> items, const SmhParams& params, Sink&& sink) {
    params.validate();
    if (items.empty()) {
        throw std::invalid_argument("no items to hash");
    }
    detail::build_tables_range(items, params, 0, params.effective_tables(),
                               std::forward<Sink>(sink));
}

/// A plain set of ids (all multiplicities 1) for pairwise candidate search.
/// Elements must be sorted and distinct.
struct IdSet {
    uint32_t id = 0;
    std::span<const uint32_t> elements;
};

/// Deduplicated pairs of set ids that share a bucket in at least one of
/// `tables` tables of `tuple_size`-sample tuples. A pair with Jaccard
/// similarity j is missed with probability (1 - j^tuple_size)^tables, so the
/// output is a candidate superset to be verified by an exact measure.
inline std::vector<std::pair<uint32_t, uint32_t>> pairwise_candidates(
    std::span<const IdSet> sets, uint32_t tuple_size, uint32_t tables, uint64_t seed) {
    if (sets.empty()) {
        return {};
    }
    std::vector<std::vector<BagEntry>> storage(sets.size());
    std::vector<ItemBag> items(sets.size());
    for (size_t i = 0; i < sets.size(); ++i) {
        storage[i].reserve(sets[i].elements.size());
        for (uint32_t e : sets[i].elements) {
            storage[i].push_back(BagEntry{e, 1});
        }
        items[i] = ItemBag{sets[i].id, storage[i]};
    }
    SmhParams params;
    params.eta = 0.5;  // unused: tables is always explicit here
    params.tuple_size = tuple_size;
    params.tables = tables;
    params.min_set_size = 2;
    params.global_seed = seed;

    std::unordered_set<uint64_t> seen;
    build_tables(items, params, [&](const BucketTable& table) {
        for (const auto& [fp, members] : table.buckets) {
            if (members.size() < 2) {
                continue;
            }
            for (size_t i = 0; i + 1 < members.size(); ++i) {
                for (size_t j = i + 1; j < members.size(); ++j) {
                    const uint32_t a = std::min(members[i], members[j]);
                    const uint32_t b = std::max(members[i], members[j]);
                    seen.insert(uint64_t(a) << 32 | b);
                }
            }
        }
    });
    std::vector<std::pair<uint32_t, uint32_t>> out;
    out.reserve(seen.size());
    for (uint64_t key : seen) {
        out.emplace_back(uint32_t(key >> 32), uint32_t(key));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace smh

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "ontorel/csv.hpp"
#include "ontorel/errors.hpp"
#include "ontorel/hash.hpp"
#include "ontorel/label.hpp"
#include "ontorel/pair.hpp"
#include "ontorel/thesaurus.hpp"

namespace ontorel {

struct GoldRecord {
    TopicPair pair;
    RelationLabel label = RelationLabel::other;

    bool operator==(const GoldRecord&) const = default;
};

/// A balanced labeled-pair dataset (the IEEE-Rel-1K shape). Built datasets
/// carry the seed that produced them; loaded ones carry seed 0.
struct GoldDataset {
    std::vector<GoldRecord> records;
    std::uint64_t seed = 0;
    std::size_t per_class_count = 0;

    std::size_t class_count(RelationLabel label) const {
        std::size_t n = 0;
        for (const auto& r : records)
            if (r.label == label) ++n;
        return n;
    }

    /// Identity used to refuse comparing reports across different datasets:
    /// SHA-256 over the records in order, fields joined by 0x1F and rows by
    /// 0x1E.
    std::string identity() const {
        std::string buf;
        for (const auto& r : records) {
            buf += r.pair.topic_a;
            buf += '\x1F';
            buf += r.pair.topic_b;
            buf += '\x1F';
            buf += label_token(r.label);
            buf += '\x1E';
        }
        return sha256_hex(buf);
    }
};

namespace detail {

class UnionFind {
public:
    std::size_t id(const std::string& term) {
        auto [it, inserted] = ids_.try_emplace(term, parent_.size());
        if (inserted) parent_.push_back(it->second);
        return it->second;
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(const std::string& a, const std::string& b) {
        std::size_t ra = find(id(a)), rb = find(id(b));
        if (ra != rb) parent_[ra] = rb;
    }
    bool connected(const std::string& a, const std::string& b) {
        auto ia = ids_.find(a), ib = ids_.find(b);
        if (ia == ids_.end() || ib == ids_.end()) return false;
        return find(ia->second) == find(ib->second);
    }

private:
    std::map<std::string, std::size_t> ids_;
    std::vector<std::size_t> parent_;
};

} // namespace detail

/// Samples a balanced gold dataset from extracted triples. The procedure is
/// fully determined by (triples, all_terms, per_class, seed); every seeded
/// draw comes from one SplitMix64 stream consumed in the order below, so an
/// independent implementation can reproduce the output byte for byte:
///
///   1. Per-label candidate pools for broader, narrower, same-as are
///      deduplicated and sorted by (subject, object), byte-wise. The term
///      pool is deduplicated and sorted byte-wise.
///   2. rng = SplitMix64(seed).
///   3. For each label in the order broader, narrower, same-as: repeatedly
///      pick index i = rng.below(pool size), swap-remove pool[i] (replace by
///      the last element, shrink), skip it when its unordered pair was
///      already taken, and accept otherwise, until per_class records are
///      accepted. An exhausted pool raises a capacity error naming the class.
///   4. `other` records: repeatedly draw i = rng.below(#terms) then
///      j = rng.below(#terms); reject when the terms are equal, when the
///      unordered pair appears in any input triple (any label, either order;
///      with exclude_transitive, when both terms share a relation component),
///      or when the pair was already taken.
///   5. The concatenated records (broader, narrower, same-as, other) are
///      shuffled by a Fisher-Yates pass: for i from n-1 down to 1 swap
///      records[i] with records[rng.below(i + 1)].
inline GoldDataset build_gold(const std::vector<RelationTriple>& triples,
                              const std::vector<std::string>& all_terms,
                              std::size_t per_class, std::uint64_t seed,
                              bool exclude_transitive = false) {
    GoldDataset out;
    out.seed = seed;
    out.per_class_count = per_class;
    if (per_class == 0) return out;

    std::array<std::vector<RelationTriple>, 3> pools;  // broader, narrower, same-as
    std::set<std::pair<std::string, std::string>> related;
    detail::UnionFind components;
    for (const auto& t : triples) {
        if (t.subject == t.object)
            throw UsageError("relation triple relates '" + t.subject + "' to itself");
        pools[label_index(t.label)].push_back(t);
        related.insert(std::minmax(t.subject, t.object));
        if (exclude_transitive) components.unite(t.subject, t.object);
    }
    for (auto& pool : pools) {
        std::sort(pool.begin(), pool.end());
        pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    }

    std::vector<std::string> terms = all_terms;
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    if (terms.size() < 2)
        throw CapacityError("need at least 2 distinct terms to sample other pairs, got " +
                            std::to_string(terms.size()));

    SplitMix64 rng(seed);
    std::set<std::pair<std::string, std::string>> used;
    auto sample_class = [&](RelationLabel label) {
        std::vector<GoldRecord> chosen;
        auto pool = pools[label_index(label)];
        while (chosen.size() < per_class) {
            if (pool.empty())
                throw CapacityError("not enough " + std::string(label_token(label)) +
                                    " relationships: requested " + std::to_string(per_class) +
                                    ", accepted " + std::to_string(chosen.size()));
            std::size_t i = static_cast<std::size_t>(rng.below(pool.size()));
            RelationTriple t = pool[i];
            pool[i] = pool.back();
            pool.pop_back();
            if (!used.insert(std::minmax(t.subject, t.object)).second) continue;
            chosen.push_back({TopicPair(t.subject, t.object), label});
        }
        return chosen;
    };

    for (RelationLabel label :
         {RelationLabel::broader, RelationLabel::narrower, RelationLabel::same_as}) {
        auto chosen = sample_class(label);
        out.records.insert(out.records.end(), chosen.begin(), chosen.end());
    }

    const std::uint64_t max_attempts = 1000ull * per_class + 10000ull;
    std::uint64_t attempts = 0;
    std::size_t accepted = 0;
    while (accepted < per_class) {
        if (++attempts > max_attempts)
            throw CapacityError("unable to sample " + std::to_string(per_class) +
                                " unrelated other pairs after " + std::to_string(attempts - 1) +
                                " attempts");
        const std::string& a = terms[rng.below(terms.size())];
        const std::string& b = terms[rng.below(terms.size())];
        if (a == b) continue;
        auto key = std::minmax(a, b);
        if (related.count(key)) continue;
        if (exclude_transitive && components.connected(a, b)) continue;
        if (!used.insert(key).second) continue;
        out.records.push_back({TopicPair(a, b), RelationLabel::other});
        ++accepted;
    }

    for (std::size_t i = out.records.size() - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(out.records[i], out.records[j]);
    }
    return out;
}

inline constexpr const char* kGoldCsvHeader = "topic_a,topic_b,label";

inline void write_gold_csv(std::ostream& os, const GoldDataset& dataset) {
    os << kGoldCsvHeader << '\n';
    for (const auto& r : dataset.records)
        csv_write_row(os, {r.pair.topic_a, r.pair.topic_b, std::string(label_token(r.label))});
}

/// Loads a gold CSV, enforcing the header, non-empty distinct pair members,
/// known label tokens, and the no-conflicting-duplicate invariant (the same
/// pair, in either order, must not reappear).
inline GoldDataset load_gold_csv(std::istream& in) {
    auto rows = csv_read(in);
    if (rows.empty() || rows[0] != std::vector<std::string>{"topic_a", "topic_b", "label"})
        throw ParseError("gold CSV must start with header '" + std::string(kGoldCsvHeader) + "'", 1);

    GoldDataset out;
    std::set<std::pair<std::string, std::string>> seen;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != 3)
            throw ParseError("gold row must have 3 fields, got " + std::to_string(row.size()),
                             i + 1);
        if (row[0].empty() || row[1].empty() || row[0] == row[1])
            throw ParseError("gold pair members must be distinct and non-empty", i + 1);
        auto label = label_from_token(row[2]);
        if (!label)
            throw ParseError("unknown label token '" + row[2] + "'", i + 1);
        if (!seen.insert(std::minmax(row[0], row[1])).second)
            throw ParseError("duplicate pair ('" + row[0] + "', '" + row[1] + "')", i + 1);
        out.records.push_back({TopicPair(row[0], row[1]), *label});
    }

    std::array<std::size_t, 4> counts{};
    for (const auto& r : out.records) ++counts[label_index(r.label)];
    bool balanced = counts[0] == counts[1] && counts[1] == counts[2] && counts[2] == counts[3];
    out.per_class_count = balanced ? counts[0] : 0;
    return out;
}

} // namespace ontorel

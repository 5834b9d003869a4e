// Exhaustive band-subset enumeration, separability ranking and ensemble
// composition from the top of a ranking.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "enfs/separability.hpp"
#include "enfs/stats.hpp"
#include "enfs/util.hpp"

namespace enfs {

// All C(n_bands, k) subsets in lexicographic order.
inline std::vector<BandSubset> enumerate_band_subsets(int n_bands, int k) {
    if (n_bands < 1) throw config_error("need at least one band");
    if (k < 1 || k > n_bands)
        throw config_error("subset size " + std::to_string(k) + " outside 1.." +
                           std::to_string(n_bands));
    std::vector<BandSubset> out;
    out.reserve(binomial(n_bands, k));
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        out.emplace_back(idx, n_bands);
        int i = k - 1;
        while (i >= 0 && idx[i] == n_bands - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

struct RankedSubset {
    BandSubset subset;
    double score = 0.0;
};

// Entries sorted by score descending, ties by lexicographic band order.
struct SubsetRanking {
    SeparabilityIndex index = SeparabilityIndex::bhattacharyya;
    int k = 0;
    std::vector<RankedSubset> entries;
};

struct RankingOptions {
    SeparabilityOptions separability;
    int max_bands = 24;  // exhaustive-search guard
    unsigned threads = 1;
};

inline SubsetRanking rank_subsets(const StatisticsSet& s, int k, SeparabilityIndex idx,
                                  const RankingOptions& opts = {}) {
    if (s.n_bands > opts.max_bands)
        throw config_error("exhaustive search over " + std::to_string(s.n_bands) +
                           " bands exceeds the cap of " + std::to_string(opts.max_bands) +
                           " (raise the cap to force it)");
    const auto subsets = enumerate_band_subsets(s.n_bands, k);
    SubsetRanking ranking;
    ranking.index = idx;
    ranking.k = k;
    ranking.entries.resize(subsets.size());
    parallel_for(
        subsets.size(),
        [&](std::size_t i) {
            ranking.entries[i].subset = subsets[i];
            ranking.entries[i].score =
                multiclass_separability(s, subsets[i], idx, opts.separability).value;
        },
        opts.threads);
    std::sort(ranking.entries.begin(), ranking.entries.end(),
              [](const RankedSubset& a, const RankedSubset& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.subset < b.subset;
              });
    return ranking;
}

struct EnsembleConfig {
    std::string ensemble_id;
    std::optional<SeparabilityIndex> index;  // nullopt: unranked lexicographic composition
    int k = 0;
    std::vector<BandSubset> members;

    int m() const { return static_cast<int>(members.size()); }
};

inline EnsembleConfig compose_ensemble(const SubsetRanking& r, int m, const std::string& id) {
    if (m < 1 || static_cast<std::size_t>(m) > r.entries.size())
        throw config_error("ensemble size " + std::to_string(m) + " exceeds the " +
                           std::to_string(r.entries.size()) + " ranked subsets");
    EnsembleConfig cfg;
    cfg.ensemble_id = id;
    cfg.index = r.index;
    cfg.k = r.k;
    cfg.members.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) cfg.members.push_back(r.entries[i].subset);
    return cfg;
}

// No separability index: the first m subsets in lexicographic enumeration
// order of size k.
inline EnsembleConfig compose_unranked_ensemble(int n_bands, int k, int m, const std::string& id) {
    const auto subsets = enumerate_band_subsets(n_bands, k);
    if (m < 1 || static_cast<std::size_t>(m) > subsets.size())
        throw config_error("ensemble size " + std::to_string(m) + " exceeds the " +
                           std::to_string(subsets.size()) + " subsets of size " +
                           std::to_string(k));
    EnsembleConfig cfg;
    cfg.ensemble_id = id;
    cfg.k = k;
    cfg.members.assign(subsets.begin(), subsets.begin() + m);
    return cfg;
}

inline std::string ranking_to_csv(const SubsetRanking& r) {
    std::string out = "rank,bands,score\n";
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
        out += std::to_string(i + 1) + "," + r.entries[i].subset.to_file_string() + "," +
               format_double(r.entries[i].score) + "\n";
    }
    return out;
}

inline void save_ranking_csv(const SubsetRanking& r, const std::string& path) {
    write_text_file(path, ranking_to_csv(r));
}

}  // namespace enfs

// Pairwise class-separability indices for multivariate Gaussian class
// models: Bhattacharyya distance, (symmetrized) divergence and transformed
// divergence, plus their multiclass aggregation over a band subset.
//
// Determinants and inverses go through Cholesky factors; log-determinants
// are accumulated as 2*sum(log diag L). All three indices are symmetric in
// their arguments bit-for-bit.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "enfs/stats.hpp"
#include "enfs/util.hpp"

namespace enfs {

enum class SeparabilityIndex { bhattacharyya, divergence, transformed_divergence };

enum class PairAggregation { mean, min };

struct SeparabilityOptions {
    double td_scale = 2000.0;  // 2.0 is the other scale in circulation
    PairAggregation aggregation = PairAggregation::mean;
};

struct SeparabilityScore {
    SeparabilityIndex index = SeparabilityIndex::bhattacharyya;
    double value = 0.0;
};

inline std::string to_string(SeparabilityIndex idx) {
    switch (idx) {
        case SeparabilityIndex::bhattacharyya: return "bhattacharyya";
        case SeparabilityIndex::divergence: return "divergence";
        case SeparabilityIndex::transformed_divergence: return "transformed_divergence";
    }
    throw config_error("unknown separability index");
}

inline SeparabilityIndex separability_index_from_string(const std::string& s) {
    if (s == "bhattacharyya") return SeparabilityIndex::bhattacharyya;
    if (s == "divergence") return SeparabilityIndex::divergence;
    if (s == "transformed_divergence") return SeparabilityIndex::transformed_divergence;
    throw config_error("unknown separability index '" + s + "'");
}

namespace detail {

struct CholeskyFactor {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double log_det = 0.0;
};

inline CholeskyFactor factor_pd(const Eigen::MatrixXd& m, const char* what) {
    CholeskyFactor f;
    f.llt.compute(m);
    if (f.llt.info() != Eigen::Success)
        throw data_error(std::string(what) + " covariance is not positive definite");
    const auto diag = f.llt.matrixLLT().diagonal();
    for (Eigen::Index i = 0; i < diag.size(); ++i) f.log_det += std::log(diag(i));
    f.log_det *= 2.0;
    return f;
}

inline void check_pair(const ClassStatistics& a, const ClassStatistics& b) {
    if (a.dimension() != b.dimension())
        throw data_error("class statistics have mismatched dimensions");
}

}  // namespace detail

inline double bhattacharyya(const ClassStatistics& a, const ClassStatistics& b) {
    detail::check_pair(a, b);
    const Eigen::MatrixXd pooled = (a.covariance + b.covariance) * 0.5;
    const auto f_pooled = detail::factor_pd(pooled, "pooled");
    const auto f_a = detail::factor_pd(a.covariance, "class");
    const auto f_b = detail::factor_pd(b.covariance, "class");
    const Eigen::VectorXd diff = a.mean - b.mean;
    const double quad = diff.dot(f_pooled.llt.solve(diff));
    const double value = 0.125 * quad + 0.5 * (f_pooled.log_det - 0.5 * (f_a.log_det + f_b.log_det));
    return std::max(0.0, value);
}

inline double divergence(const ClassStatistics& a, const ClassStatistics& b) {
    detail::check_pair(a, b);
    const auto f_a = detail::factor_pd(a.covariance, "class");
    const auto f_b = detail::factor_pd(b.covariance, "class");
    const auto d = static_cast<double>(a.dimension());
    const double tr_ab = f_b.llt.solve(a.covariance).trace();  // tr(Sigma_b^-1 Sigma_a)
    const double tr_ba = f_a.llt.solve(b.covariance).trace();  // tr(Sigma_a^-1 Sigma_b)
    const Eigen::VectorXd diff = a.mean - b.mean;
    const double quad = diff.dot(f_a.llt.solve(diff)) + diff.dot(f_b.llt.solve(diff));
    const double value = 0.5 * (tr_ab + tr_ba - 2.0 * d) + 0.5 * quad;
    return std::max(0.0, value);
}

// Saturating rescale of the divergence: td_scale * (1 - exp(-D/8)).
inline double transformed_divergence(const ClassStatistics& a, const ClassStatistics& b,
                                     double td_scale = 2000.0) {
    return td_scale * (1.0 - std::exp(-divergence(a, b) / 8.0));
}

inline double pairwise_separability(SeparabilityIndex idx, const ClassStatistics& a,
                                    const ClassStatistics& b,
                                    const SeparabilityOptions& opts = {}) {
    switch (idx) {
        case SeparabilityIndex::bhattacharyya: return bhattacharyya(a, b);
        case SeparabilityIndex::divergence: return divergence(a, b);
        case SeparabilityIndex::transformed_divergence:
            return transformed_divergence(a, b, opts.td_scale);
    }
    throw config_error("unknown separability index");
}

// Projects every class to the subset, regularizes the restricted
// covariances, evaluates the pairwise index over all unordered class pairs
// and aggregates (arithmetic mean by default, minimum as the alternative).
inline SeparabilityScore multiclass_separability(const StatisticsSet& s, const BandSubset& b,
                                                 SeparabilityIndex idx,
                                                 const SeparabilityOptions& opts = {}) {
    const auto k = s.classes.size();
    if (k < 2) throw data_error("multiclass separability needs at least 2 classes");
    std::vector<ClassStatistics> projected;
    projected.reserve(k);
    for (const auto& cs : s.classes) {
        auto p = project_to_subset(cs, b);
        p.covariance = regularize_covariance(p.covariance);
        projected.push_back(std::move(p));
    }
    double sum = 0.0;
    double minimum = std::numeric_limits<double>::infinity();
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const double v = pairwise_separability(idx, projected[i], projected[j], opts);
            sum += v;
            minimum = std::min(minimum, v);
            ++pairs;
        }
    }
    SeparabilityScore score;
    score.index = idx;
    score.value = opts.aggregation == PairAggregation::mean
                      ? sum / static_cast<double>(pairs)
                      : minimum;
    return score;
}

}  // namespace enfs

// Per-class multivariate Gaussian statistics: estimation from labeled
// samples, restriction to band subsets, and ridge regularization so the
// separability math always sees invertible covariances.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "enfs/image.hpp"
#include "enfs/util.hpp"

namespace enfs {

// Strictly increasing list of 0-based band indices.
struct BandSubset {
    std::vector<int> bands;

    BandSubset() = default;

    BandSubset(std::vector<int> indices, int n_bands) : bands(std::move(indices)) {
        if (bands.empty()) throw config_error("band subset is empty");
        for (std::size_t i = 0; i < bands.size(); ++i) {
            if (bands[i] < 0 || bands[i] >= n_bands)
                throw config_error("band index " + std::to_string(bands[i]) +
                                   " outside 0.." + std::to_string(n_bands - 1));
            if (i > 0 && bands[i] <= bands[i - 1])
                throw config_error("band subset indices must be strictly increasing");
        }
    }

    int k() const { return static_cast<int>(bands.size()); }

    // 1-based pipe-joined form used in files, e.g. "1|3|5"
    std::string to_file_string() const {
        std::string s;
        for (std::size_t i = 0; i < bands.size(); ++i) {
            if (i) s += '|';
            s += std::to_string(bands[i] + 1);
        }
        return s;
    }

    static BandSubset from_file_string(const std::string& s, int n_bands) {
        std::vector<int> idx;
        for (const auto& part : split(s, '|'))
            idx.push_back(static_cast<int>(parse_long(trim(part), "band list")) - 1);
        return BandSubset(std::move(idx), n_bands);
    }

    bool operator==(const BandSubset& other) const { return bands == other.bands; }
    bool operator<(const BandSubset& other) const { return bands < other.bands; }
};

struct ClassStatistics {
    int class_id = 0;
    int count = 0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;

    int dimension() const { return static_cast<int>(mean.size()); }
};

struct StatisticsSet {
    int n_bands = 0;
    std::vector<ClassStatistics> classes;  // indexed by class id
};

// Sample mean and (n-1)-denominator sample covariance per class.
inline StatisticsSet estimate_class_statistics(const SampleSet& train, const ClassLegend& legend) {
    train.validate(legend);
    const int d = train.n_bands;
    const int k = legend.size();
    const auto counts = train.class_counts(legend);
    for (int c = 0; c < k; ++c)
        if (counts[c] < 2)
            throw data_error("class '" + legend.name(c) + "' has " + std::to_string(counts[c]) +
                             " samples; need at least 2 to estimate a covariance");

    StatisticsSet out;
    out.n_bands = d;
    out.classes.resize(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        auto& cs = out.classes[c];
        cs.class_id = c;
        cs.count = static_cast<int>(counts[c]);
        cs.mean = Eigen::VectorXd::Zero(d);
        cs.covariance = Eigen::MatrixXd::Zero(d, d);
    }

    for (std::size_t i = 0; i < train.size(); ++i) {
        auto& cs = out.classes[train.labels[i]];
        cs.mean += Eigen::Map<const Eigen::VectorXd>(train.row(i), d);
    }
    for (int c = 0; c < k; ++c) out.classes[c].mean /= static_cast<double>(counts[c]);

    for (std::size_t i = 0; i < train.size(); ++i) {
        auto& cs = out.classes[train.labels[i]];
        const Eigen::VectorXd diff = Eigen::Map<const Eigen::VectorXd>(train.row(i), d) - cs.mean;
        cs.covariance += diff * diff.transpose();
    }
    for (int c = 0; c < k; ++c) out.classes[c].covariance /= static_cast<double>(counts[c] - 1);
    return out;
}

inline ClassStatistics project_to_subset(const ClassStatistics& s, const BandSubset& b) {
    const int d = s.dimension();
    for (const int idx : b.bands)
        if (idx >= d) throw config_error("band index " + std::to_string(idx) +
                                         " outside statistics dimension " + std::to_string(d));
    const int k = b.k();
    ClassStatistics out;
    out.class_id = s.class_id;
    out.count = s.count;
    out.mean.resize(k);
    out.covariance.resize(k, k);
    for (int i = 0; i < k; ++i) {
        out.mean(i) = s.mean(b.bands[i]);
        for (int j = 0; j < k; ++j) out.covariance(i, j) = s.covariance(b.bands[i], b.bands[j]);
    }
    return out;
}

inline StatisticsSet project_to_subset(const StatisticsSet& s, const BandSubset& b) {
    StatisticsSet out;
    out.n_bands = b.k();
    out.classes.reserve(s.classes.size());
    for (const auto& cs : s.classes) out.classes.push_back(project_to_subset(cs, b));
    return out;
}

inline bool is_positive_definite(const Eigen::MatrixXd& m) {
    if (!m.allFinite()) return false;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    return llt.info() == Eigen::Success;
}

// Returns `c` unchanged when it already admits a Cholesky factorization.
// Otherwise adds a ridge lambda*I with lambda = 1e-6 * trace/d (1e-6 when the
// trace is zero), escalating lambda tenfold up to 4 retries.
inline Eigen::MatrixXd regularize_covariance(const Eigen::MatrixXd& c) {
    const auto d = c.rows();
    if (d != c.cols()) throw data_error("covariance matrix must be square");
    const double asym = (c - c.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    if (!(asym <= 1e-12 * scale)) throw data_error("covariance matrix is not symmetric");

    if (is_positive_definite(c)) return c;

    const double trace = c.trace();
    double lambda = trace > 0.0 ? 1e-6 * trace / static_cast<double>(d) : 1e-6;
    for (int attempt = 0; attempt <= 4; ++attempt) {
        const Eigen::MatrixXd ridged =
            c + lambda * Eigen::MatrixXd::Identity(d, d);
        if (is_positive_definite(ridged)) return ridged;
        lambda *= 10.0;
    }
    throw data_error("covariance not positive definite after ridge escalation");
}

inline StatisticsSet regularize_statistics(const StatisticsSet& s) {
    StatisticsSet out = s;
    for (auto& cs : out.classes) cs.covariance = regularize_covariance(cs.covariance);
    return out;
}

}  // namespace enfs

// Gaussian-kernel soft-margin SVM trained by sequential minimal
// optimization, one-vs-one multiclass voting on top, and a Gaussian
// maximum-likelihood classifier used as baseline and oracle.
//
// The SMO solver keeps the full kernel matrix and an error cache in memory;
// that is the right trade at the sample counts this library targets.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "enfs/image.hpp"
#include "enfs/stats.hpp"
#include "enfs/util.hpp"

namespace enfs {

// Per-feature standardization learned on training data (population moments).
// Zero-variance features keep stddev 1 and are flagged.
struct FeatureScaler {
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev;
    std::vector<std::uint8_t> zero_variance;

    int dimension() const { return static_cast<int>(mean.size()); }

    static FeatureScaler fit(const Eigen::MatrixXd& rows) {
        if (rows.rows() < 2) throw data_error("scaler needs at least 2 samples");
        FeatureScaler s;
        const auto n = static_cast<double>(rows.rows());
        s.mean = rows.colwise().mean();
        s.stddev.resize(rows.cols());
        s.zero_variance.assign(static_cast<std::size_t>(rows.cols()), 0);
        for (Eigen::Index j = 0; j < rows.cols(); ++j) {
            const double var = (rows.col(j).array() - s.mean(j)).square().sum() / n;
            if (var > 0.0) {
                s.stddev(j) = std::sqrt(var);
            } else {
                s.stddev(j) = 1.0;
                s.zero_variance[static_cast<std::size_t>(j)] = 1;
            }
        }
        return s;
    }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
        if (x.size() != mean.size()) throw data_error("scaler dimension mismatch");
        return (x - mean).cwiseQuotient(stddev);
    }

    Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& rows) const {
        if (rows.cols() != mean.size()) throw data_error("scaler dimension mismatch");
        return (rows.rowwise() - mean.transpose()).array().rowwise() /
               stddev.transpose().array();
    }
};

struct SvmParams {
    double c = 10.0;
    double gamma = 0.0;  // 0 resolves to 1/(d * mean scaled feature variance) at training
    double tol = 1e-3;
    int max_passes = 10;   // consecutive stalled sweeps before giving up
    int max_iter = 10000;  // hard cap on sweeps

    void validate() const {
        if (!(c > 0.0)) throw config_error("SVM C must be positive");
        if (gamma < 0.0) throw config_error("SVM gamma must be positive (or 0 for automatic)");
        if (!(tol > 0.0)) throw config_error("SVM tolerance must be positive");
        if (max_passes < 1 || max_iter < 1) throw config_error("SVM iteration caps must be positive");
    }
};

struct TrainedBinarySvm {
    int class_pos = 0;
    int class_neg = 0;
    double gamma = 0.0;
    double c = 0.0;
    double bias = 0.0;
    bool converged = false;
    Eigen::MatrixXd support_vectors;  // one row per SV, scaled feature space
    Eigen::VectorXd dual_coef;        // alpha_i * y_i

    double decision(const Eigen::VectorXd& x) const {
        if (x.size() != support_vectors.cols())
            throw data_error("decision input dimension mismatch");
        double f = bias;
        for (Eigen::Index i = 0; i < support_vectors.rows(); ++i) {
            const double sq = (support_vectors.row(i).transpose() - x).squaredNorm();
            f += dual_coef(i) * std::exp(-gamma * sq);
        }
        return f;
    }
};

namespace detail {

inline double resolve_gamma(const Eigen::MatrixXd& scaled_rows, const SvmParams& p) {
    if (p.gamma > 0.0) return p.gamma;
    const auto d = static_cast<double>(scaled_rows.cols());
    const auto n = static_cast<double>(scaled_rows.rows());
    const Eigen::VectorXd mu = scaled_rows.colwise().mean();
    double mean_var = 0.0;
    for (Eigen::Index j = 0; j < scaled_rows.cols(); ++j)
        mean_var += (scaled_rows.col(j).array() - mu(j)).square().sum() / n;
    mean_var /= d;
    if (mean_var <= 0.0) mean_var = 1.0;
    return 1.0 / (d * mean_var);
}

inline Eigen::MatrixXd rbf_gram(const Eigen::MatrixXd& x, double gamma) {
    const Eigen::MatrixXd inner = x * x.transpose();
    const Eigen::VectorXd sq = inner.diagonal();
    Eigen::MatrixXd k(x.rows(), x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.rows(); ++j)
            k(i, j) = std::exp(-gamma * (sq(i) + sq(j) - 2.0 * inner(i, j)));
    return k;
}

// Platt's two-alpha SMO step with incremental error-cache maintenance.
class SmoSolver {
public:
    SmoSolver(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, const SvmParams& p)
        : k_(gram),
          y_(y),
          c_(p.c),
          tol_(p.tol),
          n_(static_cast<int>(y.size())),
          alpha_(Eigen::VectorXd::Zero(y.size())),
          error_(-y) {}

    // Sweeps over all samples until a sweep finds no KKT violation (within
    // tol), a stall limit of sweeps without any alpha change is hit, or the
    // hard sweep cap runs out.
    bool solve(int max_passes, int max_iter) {
        int stalls = 0;
        for (int sweep = 0; sweep < max_iter; ++sweep) {
            int violations = 0;
            int changed = 0;
            for (int i = 0; i < n_; ++i) {
                if (!violates_kkt(i)) continue;
                ++violations;
                if (examine(i)) ++changed;
            }
            if (violations == 0) return true;
            if (changed == 0) {
                if (++stalls >= max_passes) return false;
            } else {
                stalls = 0;
            }
        }
        return false;
    }

    const Eigen::VectorXd& alpha() const { return alpha_; }
    double bias() const { return bias_; }

private:
    bool violates_kkt(int i) const {
        const double r = error_(i) * y_(i);  // y_i f(x_i) - 1
        return (r < -tol_ && alpha_(i) < c_) || (r > tol_ && alpha_(i) > 0.0);
    }

    bool is_free(int i) const { return alpha_(i) > 0.0 && alpha_(i) < c_; }

    bool examine(int i) {
        // second choice: largest |E_i - E_j| over free alphas first
        int best = -1;
        double best_gap = -1.0;
        for (int j = 0; j < n_; ++j) {
            if (j == i || !is_free(j)) continue;
            const double gap = std::abs(error_(i) - error_(j));
            if (gap > best_gap) {
                best_gap = gap;
                best = j;
            }
        }
        if (best >= 0 && take_step(i, best)) return true;
        for (int off = 1; off < n_; ++off) {
            const int j = (i + off) % n_;
            if (is_free(j) && j != best && take_step(i, j)) return true;
        }
        for (int off = 1; off < n_; ++off) {
            const int j = (i + off) % n_;
            if (!is_free(j) && take_step(i, j)) return true;
        }
        return false;
    }

    bool take_step(int i, int j) {
        if (i == j) return false;
        const double ai_old = alpha_(i);
        const double aj_old = alpha_(j);
        const double yi = y_(i);
        const double yj = y_(j);
        const double s = yi * yj;

        double lo, hi;
        if (yi != yj) {
            lo = std::max(0.0, aj_old - ai_old);
            hi = std::min(c_, c_ + aj_old - ai_old);
        } else {
            lo = std::max(0.0, ai_old + aj_old - c_);
            hi = std::min(c_, ai_old + aj_old);
        }
        if (lo >= hi) return false;

        const double eta = k_(i, i) + k_(j, j) - 2.0 * k_(i, j);
        if (eta <= 0.0) return false;  // flat direction; the caller tries another j

        double aj = aj_old + yj * (error_(i) - error_(j)) / eta;
        aj = std::clamp(aj, lo, hi);
        if (aj < 1e-8 * c_) aj = 0.0;
        else if (aj > (1.0 - 1e-8) * c_) aj = c_;
        if (std::abs(aj - aj_old) < 1e-5 * (aj + aj_old + 1e-5)) return false;

        double ai = std::clamp(ai_old + s * (aj_old - aj), 0.0, c_);
        if (ai < 1e-8 * c_) ai = 0.0;
        else if (ai > (1.0 - 1e-8) * c_) ai = c_;

        const double di = yi * (ai - ai_old);
        const double dj = yj * (aj - aj_old);
        const double b1 = bias_ - error_(i) - di * k_(i, i) - dj * k_(i, j);
        const double b2 = bias_ - error_(j) - di * k_(i, j) - dj * k_(j, j);
        double new_bias;
        if (ai > 0.0 && ai < c_) new_bias = b1;
        else if (aj > 0.0 && aj < c_) new_bias = b2;
        else new_bias = 0.5 * (b1 + b2);

        const double db = new_bias - bias_;
        error_ += di * k_.col(i) + dj * k_.col(j);
        error_.array() += db;
        alpha_(i) = ai;
        alpha_(j) = aj;
        bias_ = new_bias;
        return true;
    }

    const Eigen::MatrixXd& k_;
    const Eigen::VectorXd& y_;
    double c_;
    double tol_;
    int n_;
    Eigen::VectorXd alpha_;
    Eigen::VectorXd error_;  // f(x_i) - y_i, kept current after every step
    double bias_ = 0.0;
};

}  // namespace detail

// Trains on already-scaled inputs; `pos` and `neg` are row matrices of the
// two classes. Non-convergence is reported through the returned flag, not an
// exception.
inline TrainedBinarySvm train_binary_svm(const Eigen::MatrixXd& pos, const Eigen::MatrixXd& neg,
                                         const SvmParams& params, int class_pos = 1,
                                         int class_neg = 0) {
    params.validate();
    if (pos.rows() < 1 || neg.rows() < 1)
        throw data_error("binary SVM needs samples on both sides");
    if (pos.cols() != neg.cols()) throw data_error("binary SVM feature dimensions differ");

    const auto n = pos.rows() + neg.rows();
    Eigen::MatrixXd x(n, pos.cols());
    x << pos, neg;
    Eigen::VectorXd y(n);
    y.head(pos.rows()).setOnes();
    y.tail(neg.rows()).setConstant(-1.0);

    SvmParams p = params;
    p.gamma = detail::resolve_gamma(x, params);

    const Eigen::MatrixXd gram = detail::rbf_gram(x, p.gamma);
    detail::SmoSolver solver(gram, y, p);
    const bool converged = solver.solve(p.max_passes, p.max_iter);

    TrainedBinarySvm model;
    model.class_pos = class_pos;
    model.class_neg = class_neg;
    model.gamma = p.gamma;
    model.c = p.c;
    model.bias = solver.bias();
    model.converged = converged;

    std::vector<int> sv;
    for (int i = 0; i < n; ++i)
        if (solver.alpha()(i) > 1e-12) sv.push_back(i);
    model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
    model.dual_coef.resize(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t r = 0; r < sv.size(); ++r) {
        model.support_vectors.row(static_cast<Eigen::Index>(r)) = x.row(sv[r]);
        model.dual_coef(static_cast<Eigen::Index>(r)) = solver.alpha()(sv[r]) * y(sv[r]);
    }
    return model;
}

inline double predict_decision(const TrainedBinarySvm& m, const Eigen::VectorXd& scaled_x) {
    return m.decision(scaled_x);
}

// Plurality winner over per-class vote counts; ties go to the lowest id.
inline int vote_winner(const std::vector<int>& votes) {
    if (votes.empty()) throw data_error("no votes to tally");
    int winner = 0;
    for (std::size_t c = 1; c < votes.size(); ++c)
        if (votes[c] > votes[winner]) winner = static_cast<int>(c);
    return winner;
}

struct MulticlassSvm {
    FeatureScaler scaler;
    BandSubset subset;
    ClassLegend legend;
    SvmParams params;                       // gamma resolved
    std::vector<TrainedBinarySvm> machines;  // class pairs (a,b), a<b, lexicographic

    bool fully_converged() const {
        for (const auto& m : machines)
            if (!m.converged) return false;
        return true;
    }

    // `x` is an unscaled vector in subset feature space.
    int predict(const Eigen::VectorXd& x) const {
        if (x.size() != scaler.dimension()) throw data_error("predict input dimension mismatch");
        const Eigen::VectorXd scaled = scaler.apply(x);
        std::vector<int> votes(static_cast<std::size_t>(legend.size()), 0);
        for (const auto& m : machines)
            ++votes[m.decision(scaled) > 0.0 ? m.class_pos : m.class_neg];
        return vote_winner(votes);
    }
};

namespace detail {

inline Eigen::MatrixXd project_rows(const SampleSet& s, const BandSubset& subset) {
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(s.size()), subset.k());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double* r = s.row(i);
        for (int j = 0; j < subset.k(); ++j) rows(static_cast<Eigen::Index>(i), j) = r[subset.bands[j]];
    }
    return rows;
}

}  // namespace detail

inline FeatureScaler fit_scaler(const SampleSet& train) {
    Eigen::MatrixXd rows = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                          Eigen::RowMajor>>(
        train.features.data(), static_cast<Eigen::Index>(train.size()), train.n_bands);
    return FeatureScaler::fit(rows);
}

inline MulticlassSvm train_multiclass(const SampleSet& train, const ClassLegend& legend,
                                      const BandSubset& subset, const SvmParams& params,
                                      unsigned threads = 1) {
    params.validate();
    train.validate(legend);
    const int k = legend.size();
    if (k < 2) throw data_error("multiclass training needs at least 2 classes");
    for (const int b : subset.bands)
        if (b >= train.n_bands) throw config_error("subset band outside sample dimensionality");

    const Eigen::MatrixXd projected = detail::project_rows(train, subset);

    MulticlassSvm model;
    model.subset = subset;
    model.legend = legend;
    model.scaler = FeatureScaler::fit(projected);
    const Eigen::MatrixXd scaled = model.scaler.apply_rows(projected);

    model.params = params;
    model.params.gamma = detail::resolve_gamma(scaled, params);

    std::vector<Eigen::MatrixXd> per_class(static_cast<std::size_t>(k));
    {
        std::vector<std::vector<int>> rows_of(static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < train.size(); ++i)
            rows_of[train.labels[i]].push_back(static_cast<int>(i));
        for (int c = 0; c < k; ++c) {
            if (rows_of[c].empty())
                throw data_error("class '" + legend.name(c) + "' has no training samples");
            Eigen::MatrixXd m(static_cast<Eigen::Index>(rows_of[c].size()), scaled.cols());
            for (std::size_t r = 0; r < rows_of[c].size(); ++r)
                m.row(static_cast<Eigen::Index>(r)) = scaled.row(rows_of[c][r]);
            per_class[c] = std::move(m);
        }
    }

    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) pairs.emplace_back(a, b);

    model.machines.resize(pairs.size());
    parallel_for(
        pairs.size(),
        [&](std::size_t i) {
            const auto [a, b] = pairs[i];
            model.machines[i] =
                train_binary_svm(per_class[a], per_class[b], model.params, a, b);
        },
        threads);
    return model;
}

inline int predict_multiclass(const MulticlassSvm& m, const Eigen::VectorXd& x) {
    return m.predict(x);
}

inline std::vector<std::uint16_t> classify_samples(const MulticlassSvm& m, const SampleSet& s,
                                                   unsigned threads = 1) {
    for (const int b : m.subset.bands)
        if (b >= s.n_bands) throw data_error("subset band outside sample dimensionality");
    std::vector<std::uint16_t> out(s.size());
    parallel_for(
        s.size(),
        [&](std::size_t i) {
            Eigen::VectorXd x(m.subset.k());
            const double* row = s.row(i);
            for (int j = 0; j < m.subset.k(); ++j) x(j) = row[m.subset.bands[j]];
            out[i] = static_cast<std::uint16_t>(m.predict(x));
        },
        threads);
    return out;
}

inline ClassificationMap classify_image(const MulticlassSvm& m, const MultibandImage& img,
                                        unsigned threads = 1) {
    for (const int b : m.subset.bands)
        if (b >= img.bands) throw data_error("subset band outside image bands");
    ClassificationMap map;
    map.width = img.width;
    map.height = img.height;
    map.legend = m.legend;
    map.labels.resize(map.pixel_count());
    parallel_for(
        static_cast<std::size_t>(img.height),
        [&](std::size_t row) {
            Eigen::VectorXd x(m.subset.k());
            for (int col = 0; col < img.width; ++col) {
                const std::size_t pixel = row * static_cast<std::size_t>(img.width) + col;
                for (int j = 0; j < m.subset.k(); ++j)
                    x(j) = static_cast<double>(img.at_pixel(m.subset.bands[j], pixel));
                map.labels[pixel] = static_cast<std::uint16_t>(m.predict(x));
            }
        },
        threads);
    return map;
}

// ------------------------------------------------- Gaussian ML baseline

// Maximum-likelihood Gaussian classifier over per-class statistics; the
// standard classical baseline, used here as an oracle for the SVM pipeline.
class GaussianMlClassifier {
public:
    GaussianMlClassifier(const StatisticsSet& stats, const ClassLegend& legend,
                         const BandSubset& subset)
        : legend_(legend), subset_(subset) {
        if (static_cast<int>(stats.classes.size()) != legend.size())
            throw data_error("statistics do not cover the legend");
        for (const auto& cs : stats.classes) {
            auto p = project_to_subset(cs, subset);
            p.covariance = regularize_covariance(p.covariance);
            Eigen::LLT<Eigen::MatrixXd> llt(p.covariance);
            if (llt.info() != Eigen::Success)
                throw data_error("class covariance not positive definite");
            double log_det = 0.0;
            const auto diag = llt.matrixLLT().diagonal();
            for (Eigen::Index i = 0; i < diag.size(); ++i) log_det += std::log(diag(i));
            log_det *= 2.0;
            means_.push_back(p.mean);
            factors_.push_back(std::move(llt));
            log_dets_.push_back(log_det);
        }
    }

    const ClassLegend& legend() const { return legend_; }
    const BandSubset& subset() const { return subset_; }

    double log_likelihood(int class_id, const Eigen::VectorXd& x) const {
        const Eigen::VectorXd diff = x - means_[class_id];
        const double maha = diff.dot(factors_[class_id].solve(diff));
        return -0.5 * (log_dets_[class_id] + maha);
    }

    // argmax of class log-likelihood; ties go to the lowest class id
    int predict(const Eigen::VectorXd& x) const {
        if (x.size() != means_.front().size()) throw data_error("predict input dimension mismatch");
        int best = 0;
        double best_ll = log_likelihood(0, x);
        for (std::size_t c = 1; c < means_.size(); ++c) {
            const double ll = log_likelihood(static_cast<int>(c), x);
            if (ll > best_ll) {
                best_ll = ll;
                best = static_cast<int>(c);
            }
        }
        return best;
    }

    std::vector<std::uint16_t> classify_samples(const SampleSet& s) const {
        std::vector<std::uint16_t> out(s.size());
        Eigen::VectorXd x(subset_.k());
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double* row = s.row(i);
            for (int j = 0; j < subset_.k(); ++j) x(j) = row[subset_.bands[j]];
            out[i] = static_cast<std::uint16_t>(predict(x));
        }
        return out;
    }

private:
    ClassLegend legend_;
    BandSubset subset_;
    std::vector<Eigen::VectorXd> means_;
    std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
    std::vector<double> log_dets_;
};

inline GaussianMlClassifier train_gaussian_ml_baseline(const SampleSet& train,
                                                       const ClassLegend& legend,
                                                       const BandSubset& subset) {
    return GaussianMlClassifier(estimate_class_statistics(train, legend), legend, subset);
}

// ---------------------------------------------------- model persistence

inline std::string svm_model_to_text(const MulticlassSvm& m) {
    std::string out = "svm-model v1\n";
    out += "legend " + std::to_string(m.legend.size()) + "\n";
    for (const auto& name : m.legend.names()) out += name + "\n";
    out += "subset " + m.subset.to_file_string() + "\n";
    out += "params C=" + format_double(m.params.c) + " gamma=" + format_double(m.params.gamma) +
           " tol=" + format_double(m.params.tol) +
           " max_passes=" + std::to_string(m.params.max_passes) +
           " max_iter=" + std::to_string(m.params.max_iter) + "\n";
    const int d = m.scaler.dimension();
    out += "scaler " + std::to_string(d) + "\n";
    for (int j = 0; j < d; ++j) out += (j ? " " : "") + format_double(m.scaler.mean(j));
    out += "\n";
    for (int j = 0; j < d; ++j) out += (j ? " " : "") + format_double(m.scaler.stddev(j));
    out += "\n";
    for (int j = 0; j < d; ++j) out += (j ? " " : "") + std::to_string(int(m.scaler.zero_variance[j]));
    out += "\n";
    out += "machines " + std::to_string(m.machines.size()) + "\n";
    for (const auto& bm : m.machines) {
        out += "machine pos=" + std::to_string(bm.class_pos) + " neg=" + std::to_string(bm.class_neg) +
               " bias=" + format_double(bm.bias) + " converged=" + (bm.converged ? "1" : "0") +
               " n_sv=" + std::to_string(bm.support_vectors.rows()) + "\n";
        for (Eigen::Index i = 0; i < bm.support_vectors.rows(); ++i) {
            out += format_double(bm.dual_coef(i));
            for (Eigen::Index j = 0; j < bm.support_vectors.cols(); ++j)
                out += " " + format_double(bm.support_vectors(i, j));
            out += "\n";
        }
    }
    return out;
}

inline void save_svm_model(const MulticlassSvm& m, const std::string& path) {
    write_text_file(path, svm_model_to_text(m));
}

inline MulticlassSvm load_svm_model(const std::string& path) {
    const auto lines = split(read_text_file(path), '\n');
    std::size_t ln = 0;
    const auto next_line = [&]() -> std::string {
        if (ln >= lines.size()) throw data_error("truncated model file: " + path);
        return std::string(trim(lines[ln++]));
    };
    const auto expect_field = [&](const std::string& token, const std::string& key) {
        if (token.size() <= key.size() + 1 || token.compare(0, key.size(), key) != 0 ||
            token[key.size()] != '=')
            throw data_error("malformed model field '" + token + "' in " + path);
        return token.substr(key.size() + 1);
    };

    if (next_line() != "svm-model v1") throw data_error("not an svm-model v1 file: " + path);

    auto header = split(next_line(), ' ');
    if (header.size() != 2 || header[0] != "legend") throw data_error("bad legend header in " + path);
    const int k = static_cast<int>(parse_long(header[1], path));
    std::vector<std::string> names;
    for (int c = 0; c < k; ++c) names.push_back(next_line());
    MulticlassSvm m;
    m.legend = ClassLegend(std::move(names));

    header = split(next_line(), ' ');
    if (header.size() != 2 || header[0] != "subset") throw data_error("bad subset line in " + path);
    int max_band = 0;
    for (const auto& part : split(header[1], '|'))
        max_band = std::max(max_band, static_cast<int>(parse_long(part, path)));
    m.subset = BandSubset::from_file_string(header[1], max_band);

    header = split(next_line(), ' ');
    if (header.size() != 6 || header[0] != "params") throw data_error("bad params line in " + path);
    m.params.c = parse_double(expect_field(header[1], "C"), path);
    m.params.gamma = parse_double(expect_field(header[2], "gamma"), path);
    m.params.tol = parse_double(expect_field(header[3], "tol"), path);
    m.params.max_passes = static_cast<int>(parse_long(expect_field(header[4], "max_passes"), path));
    m.params.max_iter = static_cast<int>(parse_long(expect_field(header[5], "max_iter"), path));

    header = split(next_line(), ' ');
    if (header.size() != 2 || header[0] != "scaler") throw data_error("bad scaler line in " + path);
    const int d = static_cast<int>(parse_long(header[1], path));
    m.scaler.mean.resize(d);
    m.scaler.stddev.resize(d);
    m.scaler.zero_variance.assign(static_cast<std::size_t>(d), 0);
    auto cells = split(next_line(), ' ');
    if (static_cast<int>(cells.size()) != d) throw data_error("bad scaler mean row in " + path);
    for (int j = 0; j < d; ++j) m.scaler.mean(j) = parse_double(cells[j], path);
    cells = split(next_line(), ' ');
    if (static_cast<int>(cells.size()) != d) throw data_error("bad scaler std row in " + path);
    for (int j = 0; j < d; ++j) m.scaler.stddev(j) = parse_double(cells[j], path);
    cells = split(next_line(), ' ');
    if (static_cast<int>(cells.size()) != d) throw data_error("bad scaler flag row in " + path);
    for (int j = 0; j < d; ++j)
        m.scaler.zero_variance[j] = static_cast<std::uint8_t>(parse_long(cells[j], path));

    header = split(next_line(), ' ');
    if (header.size() != 2 || header[0] != "machines") throw data_error("bad machines line in " + path);
    const auto n_machines = static_cast<std::size_t>(parse_long(header[1], path));
    m.machines.resize(n_machines);
    for (auto& bm : m.machines) {
        header = split(next_line(), ' ');
        if (header.size() != 6 || header[0] != "machine")
            throw data_error("bad machine line in " + path);
        bm.class_pos = static_cast<int>(parse_long(expect_field(header[1], "pos"), path));
        bm.class_neg = static_cast<int>(parse_long(expect_field(header[2], "neg"), path));
        bm.bias = parse_double(expect_field(header[3], "bias"), path);
        bm.converged = parse_long(expect_field(header[4], "converged"), path) != 0;
        const auto n_sv = parse_long(expect_field(header[5], "n_sv"), path);
        bm.gamma = m.params.gamma;
        bm.c = m.params.c;
        bm.support_vectors.resize(n_sv, d);
        bm.dual_coef.resize(n_sv);
        for (long i = 0; i < n_sv; ++i) {
            cells = split(next_line(), ' ');
            if (static_cast<int>(cells.size()) != d + 1)
                throw data_error("bad support-vector row in " + path);
            bm.dual_coef(i) = parse_double(cells[0], path);
            for (int j = 0; j < d; ++j) bm.support_vectors(i, j) = parse_double(cells[j + 1], path);
        }
    }
    return m;
}

}  // namespace enfs

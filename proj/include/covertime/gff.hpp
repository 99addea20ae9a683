#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "covertime/errors.hpp"
#include "covertime/network.hpp"
#include "covertime/parallel.hpp"
#include "covertime/rng.hpp"
#include "covertime/stats.hpp"

namespace covertime {

/// Gaussian free field on a network with boundary at the base vertex:
/// eta_{v0} = 0 and E(eta_x - eta_y)^2 = R_eff(x, y). The covariance over
/// V \ {v0} is the inverse grounded Laplacian, equivalently
/// Sigma_xy = (R(v0,x) + R(v0,y) - R(x,y)) / 2, sampled exactly through its
/// Cholesky factor.
class GffModel {
public:
    explicit GffModel(const ElectricalNetwork& net)
        : net_(net), solver_(net), covariance_(solver_.covariance()) {
        int m = covariance_.rows();
        if (m > 0) {
            Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
            if (llt.info() != Eigen::Success)
                throw SolverFailure("GFF covariance is not positive definite");
            factor_ = llt.matrixL();
        } else {
            factor_.resize(0, 0);
        }
    }

    const ElectricalNetwork& network() const { return net_; }
    const GroundedSolver& solver() const { return solver_; }
    /// Covariance over V \ {v0}, indexed by grounded indices.
    const Eigen::MatrixXd& covariance() const { return covariance_; }
    int field_dim() const { return static_cast<int>(covariance_.rows()); }

    double variance_of(VertexIndex v) const {
        int g = solver_.grounded_index(v);
        return g < 0 ? 0.0 : covariance_(g, g);
    }

    /// Largest per-vertex variance; at most max_pair_resistance().
    double max_variance() const {
        double m = 0.0;
        for (int g = 0; g < field_dim(); ++g) m = std::max(m, covariance_(g, g));
        return m;
    }

    /// R = max over vertex pairs of R_eff(x, y), read off the covariance.
    double max_pair_resistance() const {
        int m = field_dim();
        double r = 0.0;
        for (int a = 0; a < m; ++a) {
            r = std::max(r, covariance_(a, a));  // pair (v0, a)
            for (int b = a + 1; b < m; ++b)
                r = std::max(r, covariance_(a, a) + covariance_(b, b) - 2.0 * covariance_(a, b));
        }
        return r;
    }

    /// One exact sample over all of V, with field[v0] = 0.
    template <class Rng>
    void sample(Rng& rng, std::vector<double>& field) const {
        int m = field_dim();
        Eigen::VectorXd z(m);
        std::normal_distribution<double> gauss;
        for (int i = 0; i < m; ++i) z(i) = gauss(rng);
        Eigen::VectorXd x = factor_ * z;
        field.assign(net_.vertex_count(), 0.0);
        for (int g = 0; g < m; ++g) field[solver_.full_index(g)] = x(g);
    }

    template <class Rng>
    std::vector<double> sample(Rng& rng) const {
        std::vector<double> field;
        sample(rng, field);
        return field;
    }

private:
    ElectricalNetwork net_;
    GroundedSolver solver_;
    Eigen::MatrixXd covariance_;
    Eigen::MatrixXd factor_;
};

inline GffModel build_gff(const ElectricalNetwork& net) { return GffModel(net); }

/// Monte Carlo estimate of M = E max_{x in V} eta_x (the max includes
/// eta_{v0} = 0, so M >= 0).
struct GaussMaxEstimate {
    double m_hat = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
    double max_pair_resistance = 0.0;  // R
    double max_variance = 0.0;         // sigma^2_max <= R
};

inline GaussMaxEstimate estimate_M(const GffModel& model, std::int64_t n_samples,
                                   std::uint64_t seed, int workers = 1) {
    std::vector<double> maxima(n_samples);
    run_trials(n_samples, workers, [&](std::int64_t i) {
        auto rng = trial_rng(seed, stream::gff, i);
        std::vector<double> field;
        model.sample(rng, field);
        double m = 0.0;  // the base vertex contributes 0
        for (double v : field) m = std::max(m, v);
        maxima[i] = m;
    });
    KahanSum sum;
    for (double m : maxima) sum.add(m);
    double mean = n_samples > 0 ? sum.value() / n_samples : 0.0;
    KahanSum sq;
    for (double m : maxima) sq.add((m - mean) * (m - mean));
    double var = n_samples > 1 ? sq.value() / (n_samples - 1) : 0.0;
    GaussMaxEstimate est;
    est.m_hat = mean;
    est.std_error = n_samples > 0 ? std::sqrt(var / n_samples) : 0.0;
    est.samples = n_samples;
    est.max_pair_resistance = model.max_pair_resistance();
    est.max_variance = model.max_variance();
    return est;
}

/// Gaussian concentration of the max: P(|max - E max| >= alpha) is at most
/// 2 exp(-alpha^2 / (2 sigma^2)) when every variance is at most sigma^2.
inline TailBound gaussian_max_concentration_bound(double sigma2, double alpha) {
    return make_bound(2.0 * std::exp(-alpha * alpha / (2.0 * sigma2)));
}

}  // namespace covertime

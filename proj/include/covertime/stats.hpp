#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "covertime/errors.hpp"

namespace covertime {

/// Closed-form tail bound with its [0,1]-clamped form for reporting. A raw
/// value >= 1 is vacuous; such checks auto-pass and are flagged.
struct TailBound {
    double raw;
    double clamped;
    bool vacuous() const { return raw >= 1.0; }
};

inline TailBound make_bound(double raw) { return {raw, std::min(raw, 1.0)}; }

/// Sorted sample with a provenance tag.
class EmpiricalSample {
public:
    EmpiricalSample(std::vector<double> values, std::string tag)
        : values_(std::move(values)), tag_(std::move(tag)) {
        if (values_.empty()) throw SampleTooSmall("empty sample '" + tag_ + "'");
        std::sort(values_.begin(), values_.end());
    }

    const std::vector<double>& values() const { return values_; }
    std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }
    const std::string& tag() const { return tag_; }

private:
    std::vector<double> values_;
    std::string tag_;
};

struct TestOutcome {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;
    double alpha = 0.0;
    bool vacuous = false;
    std::string note;
};

/// DKW half-width: P(sup |F_hat - F| > delta) <= alpha at delta(n, alpha).
inline double dkw_delta(std::int64_t n, double alpha) {
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * n));
}

namespace detail {

// sup over x of |F_a(x) - F_b(x)| and sup of (F_b(x) - F_a(x)), one pass
// over the union of sorted sample points (ties advanced together).
inline std::pair<double, double> cdf_sups(const std::vector<double>& a,
                                          const std::vector<double>& b) {
    const std::size_t n1 = a.size(), n2 = b.size();
    std::size_t i = 0, j = 0;
    double sup_abs = 0.0, sup_b_minus_a = 0.0;
    while (i < n1 || j < n2) {
        double x;
        if (i < n1 && (j >= n2 || a[i] <= b[j]))
            x = a[i];
        else
            x = b[j];
        while (i < n1 && a[i] == x) ++i;
        while (j < n2 && b[j] == x) ++j;
        double fa = static_cast<double>(i) / n1;
        double fb = static_cast<double>(j) / n2;
        sup_abs = std::max(sup_abs, std::abs(fa - fb));
        sup_b_minus_a = std::max(sup_b_minus_a, fb - fa);
    }
    return {sup_abs, sup_b_minus_a};
}

inline void require_sizes(const EmpiricalSample& a, const EmpiricalSample& b) {
    if (a.size() < 50 || b.size() < 50)
        throw SampleTooSmall("two-sample tests require n >= 50 per sample");
}

}  // namespace detail

/// Two-sample Kolmogorov-Smirnov test of equality in law. Threshold is
/// c(alpha) sqrt((n1+n2)/(n1 n2)) with c(alpha) = sqrt(-ln(alpha/2)/2).
inline TestOutcome ks_two_sample(const EmpiricalSample& a, const EmpiricalSample& b,
                                 double alpha) {
    detail::require_sizes(a, b);
    TestOutcome out;
    out.name = "ks:" + a.tag() + "|" + b.tag();
    out.n1 = a.size();
    out.n2 = b.size();
    out.alpha = alpha;
    out.statistic = detail::cdf_sups(a.values(), b.values()).first;
    double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
    out.threshold = c * std::sqrt(static_cast<double>(out.n1 + out.n2) /
                                  (static_cast<double>(out.n1) * out.n2));
    out.pass = out.statistic <= out.threshold;
    return out;
}

/// One-sample Kolmogorov-Smirnov test against a continuous CDF, with the
/// (conservative, non-asymptotic) DKW threshold.
inline TestOutcome ks_one_sample(const EmpiricalSample& a,
                                 const std::function<double(double)>& cdf, double alpha) {
    if (a.size() < 50) throw SampleTooSmall("one-sample KS requires n >= 50");
    TestOutcome out;
    out.name = "ks1:" + a.tag();
    out.n1 = a.size();
    out.alpha = alpha;
    const auto& v = a.values();
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double f = cdf(v[i]);
        d = std::max(d, std::abs((i + 1) / n - f));
        d = std::max(d, std::abs(f - i / n));
    }
    out.statistic = d;
    out.threshold = dkw_delta(a.size(), alpha);
    out.pass = out.statistic <= out.threshold;
    return out;
}

/// One-sided check that `lower` is stochastically dominated by `upper`:
/// sup_s (F_upper(s) - F_lower(s)) must stay within the summed DKW bands.
/// Passing means the data are consistent with lower <=_st upper.
inline TestOutcome dominance_test(const EmpiricalSample& lower, const EmpiricalSample& upper,
                                  double alpha) {
    detail::require_sizes(lower, upper);
    TestOutcome out;
    out.name = "dom:" + lower.tag() + "<=" + upper.tag();
    out.n1 = lower.size();
    out.n2 = upper.size();
    out.alpha = alpha;
    out.statistic = detail::cdf_sups(lower.values(), upper.values()).second;
    out.threshold = dkw_delta(out.n1, alpha) + dkw_delta(out.n2, alpha);
    out.pass = out.statistic <= out.threshold;
    return out;
}

/// Concentration of a sum of N i.i.d. exponentials around its mean:
/// P(|S - mu N| >= alpha mu N) <= 2 exp(-alpha^2 N / 4) for alpha in [0,1].
inline TailBound exp_sum_tail_bound(std::int64_t n, double alpha) {
    return make_bound(2.0 * std::exp(-0.25 * alpha * alpha * n));
}

/// Deviation threshold and probability bound for inverse-local-time
/// concentration: P(|tau^+(t) - c_tot t| >= dev) <= 6 exp(-lambda/16) with
/// dev = (sqrt(lambda R t) + lambda R) c_tot / 2, valid for lambda >= 1.
struct InverseLtBound {
    double deviation;
    TailBound probability;
};

inline InverseLtBound inverse_lt_bound(double t, double lambda, double big_r, double c_tot) {
    InverseLtBound out;
    out.deviation = 0.5 * (std::sqrt(lambda * big_r * t) + lambda * big_r) * c_tot;
    out.probability = make_bound(6.0 * std::exp(-lambda / 16.0));
    return out;
}

/// Cover-time deviation scale |E| (sqrt(lambda R) M + lambda R); pass
/// c_tot/2 as the edge-count equivalent for general conductances.
inline double cover_deviation_threshold(double lambda, double big_r, double m,
                                        double edge_count_equivalent) {
    return edge_count_equivalent * (std::sqrt(lambda * big_r) * m + lambda * big_r);
}

inline double binomial_se(double p_hat, std::int64_t n) {
    return std::sqrt(std::max(p_hat * (1.0 - p_hat), 0.0) / n);
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace covertime

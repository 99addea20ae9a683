#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "covertime/errors.hpp"
#include "covertime/network.hpp"
#include "covertime/stats.hpp"
#include "covertime/walk.hpp"

namespace covertime {

/// Path-shaped network on vertices 0..N. positions[k] = sum_{i<k} 1/c_{i,i+1}
/// is the cumulative resistance from 0, which equals R_eff(0, k).
struct PathNetwork {
    std::vector<double> conductances;  // c_{k,k+1}, size N
    std::vector<double> positions;     // a_k, size N+1, a_0 = 0

    int length() const { return static_cast<int>(conductances.size()); }
};

inline PathNetwork make_path_network(std::vector<double> conductances) {
    if (conductances.empty()) throw ParseError("path needs at least one edge");
    PathNetwork p;
    p.positions.reserve(conductances.size() + 1);
    p.positions.push_back(0.0);
    for (double c : conductances) {
        if (!(c > 0.0) || !std::isfinite(c))
            throw NonpositiveConductance("path conductances must be positive and finite");
        p.positions.push_back(p.positions.back() + 1.0 / c);
    }
    p.conductances = std::move(conductances);
    return p;
}

inline PathNetwork unit_path(int n_edges) {
    return make_path_network(std::vector<double>(n_edges, 1.0));
}

inline ElectricalNetwork to_network(const PathNetwork& path, int base_vertex = 0) {
    std::vector<std::tuple<std::string, std::string, double>> edges;
    for (int k = 0; k < path.length(); ++k)
        edges.emplace_back(std::to_string(k), std::to_string(k + 1), path.conductances[k]);
    return ElectricalNetwork(edges, std::to_string(base_vertex));
}

/// Conductances whose walk, started at N and stopped at 0, has the law of
/// the walk on the (N+1)-path with a final edge of conductance r,
/// conditioned on exiting at 0:
///   c'_{k,k+1} = (N-k-1+1/r)(N-k+1/r) / ((1/r)(1+1/r)).
inline PathNetwork conditioned_conductances(int n, double r) {
    if (n < 1) throw ParseError("conditioned path requires N >= 1");
    if (!(r > 0.0)) throw NonpositiveConductance("conditioned path requires r > 0");
    const double ir = 1.0 / r;
    std::vector<double> c(n);
    for (int k = 0; k < n; ++k)
        c[k] = (n - k - 1 + ir) * (n - k + ir) / (ir * (1.0 + ir));
    return make_path_network(std::move(c));
}

/// Closed form of the cumulative position a_k on the conditioned path; the
/// telescoping sum of 1/c'_{i,i+1}.
inline double conditioned_position_closed_form(int n, double r, int k) {
    const double ir = 1.0 / r;
    return ir * (1.0 + ir) * (1.0 / (n - k + ir) - 1.0 / (n + ir));
}

/// Mean local time accumulated at the start of a Brownian excursion stopped
/// on exiting (x - r, x + s); exponential with mean rs/(r+s). For a path
/// vertex with edge resistances r, s this is 1/c_v, matching the Exp(1)
/// holding normalized by total conductance.
inline double excursion_local_time_mean(double r, double s) { return r * s / (r + s); }

/// Marginal law of |W_a|^2 for planar Brownian motion: exponential with
/// mean 2a (the sum of two independent N(0, a)^2 variables); a = 0 is a
/// point mass at zero.
struct SquaredRadiusMarginal {
    double mean;  // 2a

    double cdf(double x) const {
        if (x < 0.0) return 0.0;
        if (mean <= 0.0) return 1.0;
        return 1.0 - std::exp(-x / mean);
    }
};

inline SquaredRadiusMarginal first_rk_marginal(double a) {
    if (a < 0.0) throw ParseError("position must be nonnegative");
    return {2.0 * a};
}

/// Bound on planar Brownian motion entering the disk of squared radius
/// lambda during [eps, 1]:
///   2/log(1/eps) + (3/eps) exp(-log(1/lambda) / log(1/eps)).
inline TailBound disk_avoidance_bound(double epsilon, double lambda) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParseError("epsilon must lie in (0,1)");
    double log_ie = std::log(1.0 / epsilon);
    double raw = 2.0 / log_ie + (3.0 / epsilon) * std::exp(-std::log(1.0 / lambda) / log_ie);
    return make_bound(raw);
}

/// Planar Brownian motion evaluated on a fixed time grid (all points > 0).
/// The default grid is geometric between eps and 1, denser near eps where
/// the infimum of |W|^2 concentrates.
class PlanarBmSampler {
public:
    explicit PlanarBmSampler(std::vector<double> grid) : grid_(std::move(grid)) {
        if (grid_.size() < 2) throw ParseError("time grid needs at least two points");
        double prev = 0.0;
        for (double t : grid_) {
            if (!(t > prev)) throw ParseError("time grid must be positive and increasing");
            prev = t;
        }
    }

    static PlanarBmSampler geometric(double epsilon, int steps) {
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParseError("epsilon must lie in (0,1)");
        if (steps < 1) throw ParseError("grid needs at least one step");
        std::vector<double> g(steps + 1);
        for (int k = 0; k <= steps; ++k)
            g[k] = epsilon * std::pow(1.0 / epsilon, static_cast<double>(k) / steps);
        g.front() = epsilon;
        g.back() = 1.0;
        return PlanarBmSampler(std::move(g));
    }

    const std::vector<double>& grid() const { return grid_; }

    /// |W_t|^2 at every grid point of one path.
    template <class Rng>
    void sample_radii_sq(Rng& rng, std::vector<double>& out) const {
        std::normal_distribution<double> gauss;
        out.resize(grid_.size());
        double sd = std::sqrt(grid_.front());
        double x = sd * gauss(rng);
        double y = sd * gauss(rng);
        out[0] = x * x + y * y;
        for (std::size_t k = 1; k < grid_.size(); ++k) {
            double step = std::sqrt(grid_[k] - grid_[k - 1]);
            x += step * gauss(rng);
            y += step * gauss(rng);
            out[k] = x * x + y * y;
        }
    }

    /// Grid minimum of |W_t|^2 for one path; an overestimate of the true
    /// infimum that can only decrease under grid refinement.
    template <class Rng>
    double sample_min_sq(Rng& rng) const {
        std::normal_distribution<double> gauss;
        double sd = std::sqrt(grid_.front());
        double x = sd * gauss(rng);
        double y = sd * gauss(rng);
        double m = x * x + y * y;
        for (std::size_t k = 1; k < grid_.size(); ++k) {
            double step = std::sqrt(grid_[k] - grid_[k - 1]);
            x += step * gauss(rng);
            y += step * gauss(rng);
            m = std::min(m, x * x + y * y);
        }
        return m;
    }

private:
    std::vector<double> grid_;
};

/// One sample of the discretized infimum of |W_t|^2 over [epsilon, 1].
template <class Rng>
double simulate_min_squared_radius(double epsilon, int grid_steps, Rng& rng) {
    if (grid_steps < 1000) throw ParseError("grid_steps must be at least 1000");
    return PlanarBmSampler::geometric(epsilon, grid_steps).sample_min_sq(rng);
}

/// Discrete-time birth-death walk on 0..M with edge conductances c[k]
/// between k and k+1, stopped on arrival at `lo_absorb` (and `hi_absorb`
/// when >= 0). Records per-vertex up/down move counts and the step count.
struct PathWalkSummary {
    int absorbed_at = -1;
    std::int64_t steps = 0;
    std::vector<std::int64_t> up_moves;
    std::vector<std::int64_t> down_moves;
};

template <class Rng>
void simulate_discrete_path_walk(const std::vector<double>& edge_conductances, int start,
                                 int lo_absorb, int hi_absorb, Rng& rng, PathWalkSummary& out,
                                 std::int64_t step_budget = kDefaultJumpBudget) {
    const int m = static_cast<int>(edge_conductances.size());  // vertices 0..m
    out.absorbed_at = -1;
    out.steps = 0;
    out.up_moves.assign(m + 1, 0);
    out.down_moves.assign(m + 1, 0);
    int cur = start;
    if (cur == lo_absorb || cur == hi_absorb) {
        out.absorbed_at = cur;
        return;
    }
    std::uniform_real_distribution<double> unif;
    for (;;) {
        if (out.steps >= step_budget)
            throw BudgetExceeded("path walk step budget exhausted");
        double up_c = cur < m ? edge_conductances[cur] : 0.0;
        double down_c = cur > 0 ? edge_conductances[cur - 1] : 0.0;
        bool up = unif(rng) * (up_c + down_c) < up_c;
        if (up) {
            ++out.up_moves[cur];
            ++cur;
        } else {
            ++out.down_moves[cur];
            --cur;
        }
        ++out.steps;
        if (cur == lo_absorb || cur == hi_absorb) {
            out.absorbed_at = cur;
            return;
        }
    }
}

}  // namespace covertime

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "covertime/errors.hpp"
#include "covertime/network.hpp"
#include "covertime/parallel.hpp"
#include "covertime/rng.hpp"

namespace covertime {

inline constexpr std::int64_t kDefaultJumpBudget = 100'000'000;

enum class StopReason { cover, inverse_local_time, hit_target, jump_limit };

/// When to stop a continuous-time walk.
struct WalkStopRule {
    enum class Kind { cover_all, inverse_local_time, hit_set, fixed_jump_count };

    Kind kind = Kind::cover_all;
    double t = 0.0;                  // inverse_local_time
    std::vector<char> target_mask;   // hit_set, indexed by vertex
    std::int64_t max_jumps = 0;      // fixed_jump_count

    static WalkStopRule cover_all() { return {}; }

    static WalkStopRule inverse_local_time(double t) {
        if (!(t > 0.0)) throw ParseError("inverse local time requires t > 0");
        WalkStopRule r;
        r.kind = Kind::inverse_local_time;
        r.t = t;
        return r;
    }

    static WalkStopRule hit_mask(std::vector<char> mask) {
        bool any = std::any_of(mask.begin(), mask.end(), [](char c) { return c != 0; });
        if (!any) throw ParseError("hit set must be nonempty");
        WalkStopRule r;
        r.kind = Kind::hit_set;
        r.target_mask = std::move(mask);
        return r;
    }

    static WalkStopRule hit_set(const ElectricalNetwork& net,
                                const std::vector<std::string>& targets) {
        std::vector<char> mask(net.vertex_count(), 0);
        for (const auto& id : targets) mask[net.index_of(id)] = 1;
        return hit_mask(std::move(mask));
    }

    static WalkStopRule fixed_jump_count(std::int64_t n) {
        if (n < 1) throw ParseError("fixed jump count requires n >= 1");
        WalkStopRule r;
        r.kind = Kind::fixed_jump_count;
        r.max_jumps = n;
        return r;
    }
};

struct TraceEntry {
    std::int64_t jump_index;
    double time;
    VertexIndex vertex;
};

/// Local-time field of one trajectory: L(v) = (time held at v) / c_v, plus
/// visit counts, first-visit times and the stopping data. The accounting
/// identity stop_time = sum_v c_v L(v) holds to compensated-summation
/// accuracy; for inverse-local-time stops, L(v0) == t exactly.
struct LocalTimeField {
    std::vector<double> local_time;
    std::vector<double> first_visit;  // +inf while unvisited
    std::vector<std::int64_t> visits;
    double stop_time = 0.0;
    StopReason reason = StopReason::cover;
    std::int64_t jumps = 0;

    double weighted_total(const ElectricalNetwork& net) const {
        KahanSum s;
        for (int v = 0; v < net.vertex_count(); ++v)
            s.add(net.conductance_at(v) * local_time[v]);
        return s.value();
    }
};

namespace detail {
inline void kahan_add(double x, double& sum, double& comp) {
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
}
}  // namespace detail

/// Simulates the continuous-time random walk: jump probabilities c_xy/c_x,
/// i.i.d. Exp(1) holding times, stopping per `rule`. An inverse-local-time
/// stop truncates the final sojourn at v0 analytically, so L(v0) = t exactly.
template <class Rng>
void simulate_ctrw(const ElectricalNetwork& net, VertexIndex start, const WalkStopRule& rule,
                   Rng& rng, LocalTimeField& out,
                   std::int64_t jump_budget = kDefaultJumpBudget,
                   std::vector<TraceEntry>* trace = nullptr) {
    const int n = net.vertex_count();
    const VertexIndex v0 = net.base_vertex();
    out.local_time.assign(n, 0.0);
    out.first_visit.assign(n, std::numeric_limits<double>::infinity());
    out.visits.assign(n, 0);
    out.jumps = 0;

    static thread_local std::vector<double> lt_comp;
    lt_comp.assign(n, 0.0);

    KahanSum clock;
    std::exponential_distribution<double> exp1(1.0);

    VertexIndex cur = start;
    out.first_visit[cur] = 0.0;
    out.visits[cur] = 1;
    if (trace) trace->push_back({0, 0.0, cur});

    int unvisited = n - 1;
    using Kind = WalkStopRule::Kind;
    if (rule.kind == Kind::cover_all && unvisited == 0) {
        out.stop_time = 0.0;
        out.reason = StopReason::cover;
        return;
    }
    if (rule.kind == Kind::hit_set && rule.target_mask[cur]) {
        out.stop_time = 0.0;
        out.reason = StopReason::hit_target;
        return;
    }

    for (;;) {
        if (out.jumps >= jump_budget)
            throw BudgetExceeded("jump budget of " + std::to_string(jump_budget) + " exhausted");

        double hold = exp1(rng);
        double c_cur = net.conductance_at(cur);

        if (rule.kind == Kind::inverse_local_time && cur == v0) {
            double projected = out.local_time[v0] + hold / c_cur;
            if (projected >= rule.t) {
                clock.add((rule.t - out.local_time[v0]) * c_cur);
                out.local_time[v0] = rule.t;
                lt_comp[v0] = 0.0;
                out.stop_time = clock.value();
                out.reason = StopReason::inverse_local_time;
                return;
            }
        }

        detail::kahan_add(hold / c_cur, out.local_time[cur], lt_comp[cur]);
        clock.add(hold);

        cur = net.sample_jump(cur, rng);
        ++out.jumps;
        ++out.visits[cur];
        if (trace) trace->push_back({out.jumps, clock.value(), cur});

        if (out.visits[cur] == 1) {
            out.first_visit[cur] = clock.value();
            if (rule.kind == Kind::cover_all && --unvisited == 0) {
                out.stop_time = clock.value();
                out.reason = StopReason::cover;
                return;
            }
        }
        if (rule.kind == Kind::hit_set && rule.target_mask[cur]) {
            out.stop_time = clock.value();
            out.reason = StopReason::hit_target;
            return;
        }
        if (rule.kind == Kind::fixed_jump_count && out.jumps >= rule.max_jumps) {
            out.stop_time = clock.value();
            out.reason = StopReason::jump_limit;
            return;
        }
    }
}

template <class Rng>
LocalTimeField simulate_ctrw(const ElectricalNetwork& net, VertexIndex start,
                             const WalkStopRule& rule, Rng& rng,
                             std::int64_t jump_budget = kDefaultJumpBudget,
                             std::vector<TraceEntry>* trace = nullptr) {
    LocalTimeField out;
    simulate_ctrw(net, start, rule, rng, out, jump_budget, trace);
    return out;
}

/// Cover time of one trajectory: the arrival time at the last unvisited
/// vertex, which equals the max over v of the first-visit time.
template <class Rng>
LocalTimeField cover_time(const ElectricalNetwork& net, VertexIndex start, Rng& rng,
                          std::int64_t jump_budget = kDefaultJumpBudget) {
    return simulate_ctrw(net, start, WalkStopRule::cover_all(), rng, jump_budget);
}

/// Per-vertex empirical means of L_{tau^+(t)} with standard errors. Under
/// the second Ray-Knight identity the mean is t at every vertex.
struct ProfileEstimate {
    std::vector<double> mean;
    std::vector<double> std_error;
    std::int64_t trials = 0;
};

inline ProfileEstimate mean_local_time_profile(const ElectricalNetwork& net, double t,
                                               std::int64_t n_trials, std::uint64_t seed,
                                               int workers = 1,
                                               std::int64_t jump_budget = kDefaultJumpBudget) {
    const int n = net.vertex_count();
    std::vector<double> samples(static_cast<std::size_t>(n_trials) * n);
    WalkStopRule rule = WalkStopRule::inverse_local_time(t);
    run_trials(n_trials, workers, [&](std::int64_t i) {
        auto rng = trial_rng(seed, stream::walk, i);
        thread_local LocalTimeField field;
        simulate_ctrw(net, net.base_vertex(), rule, rng, field, jump_budget);
        std::copy(field.local_time.begin(), field.local_time.end(),
                  samples.begin() + static_cast<std::size_t>(i) * n);
    });
    ProfileEstimate est;
    est.trials = n_trials;
    est.mean.resize(n);
    est.std_error.resize(n);
    for (int v = 0; v < n; ++v) {
        KahanSum s;
        for (std::int64_t i = 0; i < n_trials; ++i)
            s.add(samples[static_cast<std::size_t>(i) * n + v]);
        double mean = s.value() / n_trials;
        KahanSum sq;
        for (std::int64_t i = 0; i < n_trials; ++i) {
            double d = samples[static_cast<std::size_t>(i) * n + v] - mean;
            sq.add(d * d);
        }
        est.mean[v] = mean;
        est.std_error[v] = n_trials > 1 ? std::sqrt(sq.value() / (n_trials - 1) / n_trials) : 0.0;
    }
    return est;
}

/// Monte Carlo hitting statistics. Each trial from a start x runs to cover,
/// so one trajectory yields first-passage samples to every target at once.
struct HittingStats {
    std::vector<std::vector<double>> mean_hit;      // [start][target]
    std::vector<std::vector<double>> se_hit;        // [start][target]
    std::vector<double> mean_cover;                 // E_x tau_cov
    std::vector<double> se_cover;
    double t_hit = 0.0;       // max over ordered pairs
    double t_hit_se = 0.0;    // SE of the attaining pair
    double t_cov = 0.0;       // max over starts of E_x tau_cov
    double t_cov_se = 0.0;
    std::int64_t trials_per_start = 0;
};

inline HittingStats hitting_time_stats(const ElectricalNetwork& net,
                                       std::int64_t trials_per_start, std::uint64_t seed,
                                       int workers = 1,
                                       std::int64_t jump_budget = kDefaultJumpBudget) {
    const int n = net.vertex_count();
    // first_visit samples, laid out trial-major per start
    std::vector<double> fv(static_cast<std::size_t>(n) * trials_per_start * n);
    std::vector<double> cov(static_cast<std::size_t>(n) * trials_per_start);
    run_trials(static_cast<std::int64_t>(n) * trials_per_start, workers, [&](std::int64_t idx) {
        VertexIndex start = static_cast<VertexIndex>(idx / trials_per_start);
        auto rng = trial_rng(seed, stream::hitting, idx);
        thread_local LocalTimeField field;
        simulate_ctrw(net, start, WalkStopRule::cover_all(), rng, field, jump_budget);
        std::copy(field.first_visit.begin(), field.first_visit.end(),
                  fv.begin() + static_cast<std::size_t>(idx) * n);
        cov[idx] = field.stop_time;
    });

    HittingStats st;
    st.trials_per_start = trials_per_start;
    st.mean_hit.assign(n, std::vector<double>(n, 0.0));
    st.se_hit.assign(n, std::vector<double>(n, 0.0));
    st.mean_cover.resize(n);
    st.se_cover.resize(n);
    auto mean_se = [&](auto&& value_at, double& mean, double& se) {
        KahanSum s;
        for (std::int64_t i = 0; i < trials_per_start; ++i) s.add(value_at(i));
        mean = s.value() / trials_per_start;
        KahanSum sq;
        for (std::int64_t i = 0; i < trials_per_start; ++i) {
            double d = value_at(i) - mean;
            sq.add(d * d);
        }
        se = trials_per_start > 1
                 ? std::sqrt(sq.value() / (trials_per_start - 1) / trials_per_start)
                 : 0.0;
    };
    for (int x = 0; x < n; ++x) {
        std::size_t base = static_cast<std::size_t>(x) * trials_per_start;
        for (int y = 0; y < n; ++y) {
            mean_se([&](std::int64_t i) { return fv[(base + i) * n + y]; }, st.mean_hit[x][y],
                    st.se_hit[x][y]);
        }
        mean_se([&](std::int64_t i) { return cov[base + i]; }, st.mean_cover[x], st.se_cover[x]);
        if (st.mean_cover[x] > st.t_cov) {
            st.t_cov = st.mean_cover[x];
            st.t_cov_se = st.se_cover[x];
        }
        for (int y = 0; y < n; ++y) {
            if (x != y && st.mean_hit[x][y] > st.t_hit) {
                st.t_hit = st.mean_hit[x][y];
                st.t_hit_se = st.se_hit[x][y];
            }
        }
    }
    return st;
}

/// Local times of a refined-walk trajectory restricted to parent vertices.
/// `refined` keeps the G_N normalization (this is the Proposition 3.2
/// projection); `induced` = N * refined is the same data normalized by the
/// parent conductances, i.e. the local time of the induced walk on G whose
/// waiting times are scaled by N.
struct ProjectedLocalTimes {
    std::vector<double> refined;
    std::vector<double> induced;
    double stop_time = 0.0;
};

inline ProjectedLocalTimes project_refined_walk(const Refinement& ref,
                                                const LocalTimeField& refined_field) {
    const int n = ref.parent().vertex_count();
    ProjectedLocalTimes out;
    out.refined.resize(n);
    out.induced.resize(n);
    out.stop_time = refined_field.stop_time;
    for (int p = 0; p < n; ++p) {
        double l = refined_field.local_time[ref.child_of_parent(p)];
        out.refined[p] = l;
        out.induced[p] = ref.subdivisions() * l;
    }
    return out;
}

/// One excursion on the refinement from parent vertex x to the first other
/// parent vertex. visits_to_x is geometric with mean N.
struct ParentExcursion {
    VertexIndex exit_parent = -1;
    std::int64_t visits_to_start = 0;
    LocalTimeField field;
};

template <class Rng>
void simulate_to_parent_exit(const Refinement& ref, VertexIndex parent_x, Rng& rng,
                             ParentExcursion& out,
                             std::int64_t jump_budget = kDefaultJumpBudget) {
    const ElectricalNetwork& child = ref.child();
    std::vector<char> mask(child.vertex_count(), 0);
    for (int p = 0; p < ref.parent().vertex_count(); ++p)
        if (p != parent_x) mask[ref.child_of_parent(p)] = 1;
    WalkStopRule rule = WalkStopRule::hit_mask(std::move(mask));
    simulate_ctrw(child, ref.child_of_parent(parent_x), rule, rng, out.field, jump_budget);
    VertexIndex final_child = -1;
    // the stop vertex is the unique parent (other than x) with a visit
    for (int p = 0; p < ref.parent().vertex_count(); ++p) {
        if (p == parent_x) continue;
        if (out.field.visits[ref.child_of_parent(p)] > 0) {
            final_child = ref.child_of_parent(p);
            break;
        }
    }
    out.exit_parent = ref.parent_of_child(final_child);
    out.visits_to_start = out.field.visits[ref.child_of_parent(parent_x)];
}

/// Range of sub-vertices for edge-local-time minima. Without exit_vertex the
/// minimum runs over v_{xy,i}, i in [lo,hi], across every parent neighbor y
/// of x. With exit_vertex = y the trial is conditioned (by rejection) on the
/// walk leaving x's neighborhood at y, and the minimum runs over v_{yx,k},
/// k in [lo,hi].
struct EdgeRangeSpec {
    int lo = 0;
    int hi = 0;
    std::optional<VertexIndex> exit_vertex;
};

template <class Rng>
double edge_min_local_time(const Refinement& ref, VertexIndex parent_x, const EdgeRangeSpec& spec,
                           Rng& rng, std::int64_t jump_budget = kDefaultJumpBudget,
                           int rejection_budget = 10'000) {
    thread_local ParentExcursion exc;
    if (spec.exit_vertex) {
        int attempts = 0;
        for (;;) {
            if (++attempts > rejection_budget)
                throw RejectionBudgetExceeded("conditioned excursion rejection budget exhausted");
            simulate_to_parent_exit(ref, parent_x, rng, exc, jump_budget);
            if (exc.exit_parent == *spec.exit_vertex) break;
        }
        double m = std::numeric_limits<double>::infinity();
        for (int k = spec.lo; k <= spec.hi; ++k) {
            VertexIndex v = ref.sub_vertex(*spec.exit_vertex, parent_x, k);
            m = std::min(m, exc.field.local_time[v]);
        }
        return m;
    }
    simulate_to_parent_exit(ref, parent_x, rng, exc, jump_budget);
    double m = std::numeric_limits<double>::infinity();
    const ElectricalNetwork& parent = ref.parent();
    auto s = parent.neighbors(parent_x);
    VertexIndex prev = -1;
    for (int a = 0; a < s.size; ++a) {
        VertexIndex y = s.targets[a];
        if (y == parent_x || y == prev) continue;  // skip loops and merged duplicates
        prev = y;
        for (int k = spec.lo; k <= spec.hi; ++k) {
            VertexIndex v = ref.sub_vertex(parent_x, y, k);
            m = std::min(m, exc.field.local_time[v]);
        }
    }
    return m;
}

}  // namespace covertime

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "covertime/fixtures.hpp"
#include "covertime/stats.hpp"
#include "covertime/walk.hpp"
#include "oracles.hpp"

using namespace covertime;
using Catch::Approx;

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / v.size();
}

double se_of(const std::vector<double>& v) {
    double m = mean_of(v);
    double sq = 0.0;
    for (double x : v) sq += (x - m) * (x - m);
    return std::sqrt(sq / (v.size() - 1) / v.size());
}

}  // namespace

TEST_CASE("single exponential sojourn to hit the other vertex") {
    auto net = fixture("two_vertex");
    auto rule = WalkStopRule::hit_set(net, {"b"});
    const int n = 20000;
    std::vector<double> times(n);
    for (int i = 0; i < n; ++i) {
        auto rng = trial_rng(1, stream::walk, i);
        auto field = simulate_ctrw(net, net.base_vertex(), rule, rng);
        REQUIRE(field.reason == StopReason::hit_target);
        times[i] = field.stop_time;
    }
    CHECK(std::abs(mean_of(times) - 1.0) <= 3.0 * se_of(times));
}

TEST_CASE("inverse local time stops exactly at t") {
    for (const auto& name : {"two_vertex", "triangle", "four_cycle"}) {
        auto net = fixture(name);
        auto rule = WalkStopRule::inverse_local_time(0.7);
        for (int i = 0; i < 200; ++i) {
            auto rng = trial_rng(2, stream::walk, i);
            auto field = simulate_ctrw(net, net.base_vertex(), rule, rng);
            REQUIRE(field.local_time[net.base_vertex()] == 0.7);
            REQUIRE(field.reason == StopReason::inverse_local_time);
        }
    }
}

TEST_CASE("accounting identity stop_time = sum c_v L(v)") {
    for (const auto& name : {"triangle", "four_cycle", "star5", "torus8"}) {
        auto net = fixture(name);
        for (int i = 0; i < 200; ++i) {
            auto rng = trial_rng(3, stream::walk, i);
            auto rule = (i % 2 == 0) ? WalkStopRule::cover_all()
                                     : WalkStopRule::inverse_local_time(0.5 + 0.01 * (i % 7));
            auto field = simulate_ctrw(net, net.base_vertex(), rule, rng);
            double total = field.weighted_total(net);
            REQUIRE(std::abs(total - field.stop_time) <= 1e-9 * std::max(field.stop_time, 1.0));
        }
    }
}

TEST_CASE("inverse local time is monotone along a shared trajectory") {
    auto net = fixture("triangle");
    for (int i = 0; i < 100; ++i) {
        auto r1 = trial_rng(4, stream::walk, i);
        auto r2 = trial_rng(4, stream::walk, i);
        auto f1 = simulate_ctrw(net, net.base_vertex(), WalkStopRule::inverse_local_time(0.4), r1);
        auto f2 = simulate_ctrw(net, net.base_vertex(), WalkStopRule::inverse_local_time(1.1), r2);
        REQUIRE(f1.stop_time <= f2.stop_time);
    }
}

TEST_CASE("flat mean local-time profile at inverse local time") {
    auto net = fixture("triangle");
    const double t = 1.0;
    auto prof = mean_local_time_profile(net, t, 30000, 5);
    CHECK(prof.mean[net.base_vertex()] == t);  // exact by construction
    for (int v = 0; v < net.vertex_count(); ++v) {
        INFO("vertex " << net.id_of(v));
        CHECK(std::abs(prof.mean[v] - t) <= 3.0 * std::max(prof.std_error[v], 1e-12));
    }
}

TEST_CASE("expected inverse local time is c_tot * t") {
    auto net = fixture("four_cycle");
    const double t = 0.5;
    const int n = 20000;
    std::vector<double> taus(n);
    auto rule = WalkStopRule::inverse_local_time(t);
    for (int i = 0; i < n; ++i) {
        auto rng = trial_rng(6, stream::walk, i);
        taus[i] = simulate_ctrw(net, net.base_vertex(), rule, rng).stop_time;
    }
    CHECK(std::abs(mean_of(taus) - net.total_conductance() * t) <= 3.0 * se_of(taus));
}

TEST_CASE("cover time") {
    SECTION("two vertices: cover time is the first hitting time of b") {
        auto net = fixture("two_vertex");
        for (int i = 0; i < 100; ++i) {
            auto rng = trial_rng(7, stream::cover, i);
            auto field = cover_time(net, net.base_vertex(), rng);
            REQUIRE(field.stop_time == field.first_visit[net.index_of("b")]);
        }
    }
    SECTION("cover time equals the max first-visit time") {
        auto net = fixture("star5");
        for (int i = 0; i < 100; ++i) {
            auto rng = trial_rng(8, stream::cover, i);
            auto field = cover_time(net, net.base_vertex(), rng);
            double worst = 0.0;
            for (double f : field.first_visit) worst = std::max(worst, f);
            REQUIRE(field.stop_time == worst);
        }
    }
    SECTION("triangle mean matches the first-step-analysis oracle") {
        auto net = fixture("triangle");
        double exact = oracle::exact_mean_cover_time(net, net.base_vertex());
        CHECK(exact == Approx(3.0));  // hand value: 1 + 2
        const int n = 30000;
        std::vector<double> covers(n);
        for (int i = 0; i < n; ++i) {
            auto rng = trial_rng(9, stream::cover, i);
            covers[i] = cover_time(net, net.base_vertex(), rng).stop_time;
        }
        CHECK(std::abs(mean_of(covers) - exact) <= 3.0 * se_of(covers));
    }
}

TEST_CASE("hitting time statistics") {
    SECTION("two vertices: mean hit is 1") {
        auto net = fixture("two_vertex");
        auto st = hitting_time_stats(net, 20000, 10);
        int a = net.index_of("a"), b = net.index_of("b");
        CHECK(std::abs(st.mean_hit[a][b] - 1.0) <= 3.0 * st.se_hit[a][b]);
        CHECK(st.t_hit >= 1.0 - 3.0 * st.t_hit_se);
    }
    SECTION("triangle commute time matches c_tot * R_eff = 4") {
        auto net = fixture("triangle");
        auto st = hitting_time_stats(net, 20000, 11);
        int a = net.index_of("a"), b = net.index_of("b");
        double commute = st.mean_hit[a][b] + st.mean_hit[b][a];
        double se = std::hypot(st.se_hit[a][b], st.se_hit[b][a]);
        CHECK(std::abs(commute - 4.0) <= 3.0 * se);
        // cross-check the Monte Carlo against exact first-step analysis
        double exact = oracle::exact_mean_hitting_time(net, a, b);
        CHECK(exact == Approx(2.0));
        CHECK(std::abs(st.mean_hit[a][b] - exact) <= 3.0 * st.se_hit[a][b]);
    }
    SECTION("t_hit >= |E| R on small fixtures") {
        for (const auto& name : {"two_vertex", "triangle", "four_cycle", "star5"}) {
            auto net = fixture(name);
            GroundedSolver solver(net);
            double big_r = 0.0;
            for (int x = 0; x < net.vertex_count(); ++x)
                for (int y = 0; y < net.vertex_count(); ++y)
                    big_r = std::max(big_r, solver.resistance(x, y));
            auto st = hitting_time_stats(net, 4000, 12);
            REQUIRE(st.t_hit >= net.edge_count_equivalent() * big_r - 3.0 * st.t_hit_se);
        }
    }
}

TEST_CASE("jump budget is enforced") {
    auto net = fixture("torus8");
    auto rng = trial_rng(13, stream::walk, 0);
    CHECK_THROWS_AS(
        simulate_ctrw(net, net.base_vertex(), WalkStopRule::cover_all(), rng, 10),
        BudgetExceeded);
}

TEST_CASE("fixed jump count and trace recording") {
    auto net = fixture("triangle");
    auto rng = trial_rng(14, stream::walk, 0);
    std::vector<TraceEntry> trace;
    auto field = simulate_ctrw(net, net.base_vertex(), WalkStopRule::fixed_jump_count(25), rng,
                               kDefaultJumpBudget, &trace);
    CHECK(field.jumps == 25);
    CHECK(field.reason == StopReason::jump_limit);
    REQUIRE(trace.size() == 26);  // start entry plus one per jump
    CHECK(trace.front().jump_index == 0);
    CHECK(trace.front().vertex == net.base_vertex());
    for (std::size_t i = 1; i < trace.size(); ++i) {
        CHECK(trace[i].time >= trace[i - 1].time);
        CHECK(trace[i].jump_index == static_cast<std::int64_t>(i));
    }
    CHECK(trace.back().time == Approx(field.stop_time));
}

TEST_CASE("refined walk projection") {
    auto net = fixture("triangle");
    auto ref = refine(net, 4);

    SECTION("projected transition frequencies follow c_xy/c_x") {
        const int n = 20000;
        int a = net.index_of("a");
        std::vector<std::int64_t> exits(net.vertex_count(), 0);
        ParentExcursion exc;
        for (int i = 0; i < n; ++i) {
            auto rng = trial_rng(15, stream::sojourn, i);
            simulate_to_parent_exit(ref, a, rng, exc);
            ++exits[exc.exit_parent];
        }
        for (int y = 0; y < net.vertex_count(); ++y) {
            if (y == a) continue;
            double p_hat = static_cast<double>(exits[y]) / n;
            CHECK(std::abs(p_hat - 0.5) <= 3.0 * binomial_se(p_hat, n));
        }
    }

    SECTION("visits per parent sojourn are geometric with mean N") {
        const int n = 20000;
        std::vector<double> counts(n);
        ParentExcursion exc;
        for (int i = 0; i < n; ++i) {
            auto rng = trial_rng(16, stream::sojourn, i);
            simulate_to_parent_exit(ref, net.base_vertex(), rng, exc);
            counts[i] = static_cast<double>(exc.visits_to_start);
        }
        CHECK(std::abs(mean_of(counts) - ref.subdivisions()) <= 3.0 * se_of(counts));
    }

    SECTION("projected inverse-local-time law matches the direct walk") {
        const double t = 1.0;
        const int n = 20000;
        int b = net.index_of("b");
        std::vector<double> projected(n), direct(n);
        auto rule = WalkStopRule::inverse_local_time(t);
        LocalTimeField field;
        for (int i = 0; i < n; ++i) {
            auto rng = trial_rng(17, stream::walk, i);
            simulate_ctrw(ref.child(), ref.child().base_vertex(), rule, rng, field);
            auto proj = project_refined_walk(ref, field);
            projected[i] = proj.refined[b];
            // induced normalization is N times the projected one
            REQUIRE(proj.induced[b] == Approx(ref.subdivisions() * proj.refined[b]));
        }
        for (int i = 0; i < n; ++i) {
            auto rng = trial_rng(18, stream::walk, i);
            simulate_ctrw(net, net.base_vertex(), rule, rng, field);
            direct[i] = field.local_time[b];
        }
        auto outcome = ks_two_sample(EmpiricalSample(projected, "projected"),
                                     EmpiricalSample(direct, "direct"), 0.01);
        CHECK(outcome.pass);
    }
}

TEST_CASE("edge minimum local times") {
    SECTION("sub-vertex local time is positive whenever visited") {
        auto ref = refine(fixture("single_edge"), 2);
        ParentExcursion exc;
        for (int i = 0; i < 200; ++i) {
            auto rng = trial_rng(19, stream::edge_min, i);
            simulate_to_parent_exit(ref, ref.parent().base_vertex(), rng, exc);
            for (int v = 0; v < ref.child().vertex_count(); ++v) {
                if (exc.field.visits[v] > 0 && v != ref.child_of_parent(exc.exit_parent))
                    REQUIRE(exc.field.local_time[v] > 0.0);
            }
        }
    }
    SECTION("conditioned trials only accept the requested exit") {
        auto net = fixture("triangle");
        auto ref = refine(net, 4);
        int a = net.index_of("a"), b = net.index_of("b");
        EdgeRangeSpec spec;
        spec.lo = 1;
        spec.hi = 3;
        spec.exit_vertex = b;
        for (int i = 0; i < 50; ++i) {
            auto rng = trial_rng(20, stream::edge_min, i);
            double m = edge_min_local_time(ref, a, spec, rng);
            REQUIRE(m > 0.0);  // the bridge to b crosses every interior sub-vertex
        }
    }
    SECTION("rejection budget is enforced") {
        auto net = fixture("triangle");
        auto ref = refine(net, 4);
        EdgeRangeSpec spec;
        spec.lo = 0;
        spec.hi = 0;
        spec.exit_vertex = net.index_of("b");
        auto rng = trial_rng(21, stream::edge_min, 0);
        CHECK_THROWS_AS(edge_min_local_time(ref, net.index_of("a"), spec, rng,
                                            kDefaultJumpBudget, 0),
                        RejectionBudgetExceeded);
    }
}

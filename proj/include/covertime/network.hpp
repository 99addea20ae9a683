#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "covertime/errors.hpp"

namespace covertime {

using VertexIndex = int;

/// Weighted undirected multigraph with a distinguished base vertex. Vertex
/// ids are strings externally and dense indices internally. Immutable after
/// construction; safe for concurrent reads.
///
/// Conventions: parallel edges merge by summing conductances. A self-loop
/// (x,x,c) contributes c to c_x once and induces a lazy self-jump with
/// probability c/c_x; it does not enter the Laplacian. c_tot = sum_x c_x.
class ElectricalNetwork {
public:
    struct Edge {
        VertexIndex u;
        VertexIndex v;
        double conductance;
    };

    ElectricalNetwork(const std::vector<std::tuple<std::string, std::string, double>>& edges,
                      const std::string& base_vertex) {
        if (edges.empty()) throw ParseError("edge list is empty");
        auto intern = [this](const std::string& id) {
            auto it = index_of_.find(id);
            if (it != index_of_.end()) return it->second;
            VertexIndex idx = static_cast<VertexIndex>(ids_.size());
            ids_.push_back(id);
            index_of_.emplace(id, idx);
            return idx;
        };
        // Merge parallel edges (including parallel self-loops).
        std::map<std::pair<VertexIndex, VertexIndex>, double> merged;
        for (const auto& [x, y, c] : edges) {
            if (!std::isfinite(c) || c <= 0.0)
                throw NonpositiveConductance("conductance for edge (" + x + ", " + y +
                                             ") must be positive and finite");
            VertexIndex i = intern(x);
            VertexIndex j = intern(y);
            if (i > j) std::swap(i, j);
            merged[{i, j}] += c;
        }
        auto v0 = index_of_.find(base_vertex);
        if (v0 == index_of_.end())
            throw UnknownBaseVertex("base vertex '" + base_vertex + "' does not appear in any edge");
        base_ = v0->second;

        edges_.reserve(merged.size());
        for (const auto& [key, c] : merged) edges_.push_back({key.first, key.second, c});
        build_adjacency();
        check_connected();
    }

    int vertex_count() const { return static_cast<int>(ids_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    VertexIndex base_vertex() const { return base_; }
    const std::string& id_of(VertexIndex v) const { return ids_[v]; }
    const std::vector<std::string>& vertex_ids() const { return ids_; }

    VertexIndex index_of(const std::string& id) const {
        auto it = index_of_.find(id);
        if (it == index_of_.end()) throw UnknownBaseVertex("unknown vertex '" + id + "'");
        return it->second;
    }
    bool has_vertex(const std::string& id) const { return index_of_.count(id) != 0; }

    /// Total conductance at v (self-loop counted once).
    double conductance_at(VertexIndex v) const { return c_vertex_[v]; }
    /// c_tot = sum over ordered vertex pairs of c_xy = sum_x c_x.
    double total_conductance() const { return c_tot_; }
    /// Edge-count equivalent c_tot/2; equals |E| when all conductances are 1.
    double edge_count_equivalent() const { return 0.5 * c_tot_; }

    // Neighbor slice of v in CSR layout; cumulative conductances end at c_v.
    struct NeighborSlice {
        const VertexIndex* targets;
        const double* cumulative;
        int size;
    };
    NeighborSlice neighbors(VertexIndex v) const {
        int lo = offsets_[v];
        return {adj_targets_.data() + lo, adj_cum_.data() + lo, offsets_[v + 1] - lo};
    }

    /// Jump-chain step: picks the next vertex with probability c_vw / c_v.
    template <class Rng>
    VertexIndex sample_jump(VertexIndex v, Rng& rng) const {
        NeighborSlice s = neighbors(v);
        if (s.size == 1) return s.targets[0];
        double u = std::uniform_real_distribution<double>(0.0, c_vertex_[v])(rng);
        const double* it = std::upper_bound(s.cumulative, s.cumulative + s.size, u);
        int k = static_cast<int>(it - s.cumulative);
        if (k >= s.size) k = s.size - 1;  // guard against u == c_v roundoff
        return s.targets[k];
    }

private:
    void build_adjacency() {
        int n = vertex_count();
        std::vector<std::vector<std::pair<VertexIndex, double>>> adj(n);
        for (const Edge& e : edges_) {
            adj[e.u].emplace_back(e.v, e.conductance);
            if (e.u != e.v) adj[e.v].emplace_back(e.u, e.conductance);
        }
        offsets_.assign(n + 1, 0);
        c_vertex_.assign(n, 0.0);
        for (int v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + static_cast<int>(adj[v].size());
        adj_targets_.resize(offsets_[n]);
        adj_cum_.resize(offsets_[n]);
        c_tot_ = 0.0;
        for (int v = 0; v < n; ++v) {
            double cum = 0.0;
            int at = offsets_[v];
            for (const auto& [w, c] : adj[v]) {
                cum += c;
                adj_targets_[at] = w;
                adj_cum_[at] = cum;
                ++at;
            }
            c_vertex_[v] = cum;
            c_tot_ += cum;
        }
    }

    void check_connected() const {
        int n = vertex_count();
        std::vector<char> seen(n, 0);
        std::vector<VertexIndex> stack{base_};
        seen[base_] = 1;
        int reached = 1;
        while (!stack.empty()) {
            VertexIndex v = stack.back();
            stack.pop_back();
            NeighborSlice s = neighbors(v);
            for (int k = 0; k < s.size; ++k) {
                VertexIndex w = s.targets[k];
                if (!seen[w]) {
                    seen[w] = 1;
                    ++reached;
                    stack.push_back(w);
                }
            }
        }
        if (reached != n) throw DisconnectedGraph("graph is not connected");
    }

    std::vector<std::string> ids_;
    std::unordered_map<std::string, VertexIndex> index_of_;
    std::vector<Edge> edges_;
    std::vector<int> offsets_;
    std::vector<VertexIndex> adj_targets_;
    std::vector<double> adj_cum_;
    std::vector<double> c_vertex_;
    double c_tot_ = 0.0;
    VertexIndex base_ = 0;
};

inline ElectricalNetwork build_network(
    const std::vector<std::tuple<std::string, std::string, double>>& edges,
    const std::string& base_vertex) {
    return ElectricalNetwork(edges, base_vertex);
}

/// Parses the graph file format: lines `x y c`, one `v0 <id>` directive,
/// `#` starts a comment, duplicate edges merge.
inline ElectricalNetwork parse_network(std::istream& in) {
    std::vector<std::tuple<std::string, std::string, double>> edges;
    std::optional<std::string> base;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (tok[0] == "v0" && tok.size() == 2) {
            if (base) throw ParseError("line " + std::to_string(lineno) + ": duplicate v0 directive");
            base = tok[1];
            continue;
        }
        if (tok.size() != 3)
            throw ParseError("line " + std::to_string(lineno) + ": expected 'x y c'");
        std::size_t used = 0;
        double c = 0.0;
        try {
            c = std::stod(tok[2], &used);
        } catch (const std::exception&) {
            throw ParseError("line " + std::to_string(lineno) + ": bad conductance '" + tok[2] + "'");
        }
        if (used != tok[2].size())
            throw ParseError("line " + std::to_string(lineno) + ": bad conductance '" + tok[2] + "'");
        if (!std::isfinite(c) || c <= 0.0)
            throw NonpositiveConductance("line " + std::to_string(lineno) +
                                         ": conductance must be positive and finite");
        edges.emplace_back(tok[0], tok[1], c);
    }
    if (!base) throw ParseError("missing 'v0 <id>' directive");
    return ElectricalNetwork(edges, *base);
}

/// Dense Cholesky of the grounded Laplacian (row/column of the base vertex
/// removed). One factorization serves all resistance queries and the GFF
/// covariance. Intended for desk-scale graphs (<= ~5000 vertices).
class GroundedSolver {
public:
    explicit GroundedSolver(const ElectricalNetwork& net)
        : n_(net.vertex_count()), ground_(net.base_vertex()) {
        int m = n_ - 1;
        grounded_of_.assign(n_, -1);
        full_of_.assign(m, 0);
        for (int v = 0, g = 0; v < n_; ++v) {
            if (v == ground_) continue;
            grounded_of_[v] = g;
            full_of_[g] = v;
            ++g;
        }
        Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(m, m);
        for (const auto& e : net.edges()) {
            if (e.u == e.v) continue;  // self-loops do not enter the Laplacian
            int gu = grounded_of_[e.u];
            int gv = grounded_of_[e.v];
            if (gu >= 0) lap(gu, gu) += e.conductance;
            if (gv >= 0) lap(gv, gv) += e.conductance;
            if (gu >= 0 && gv >= 0) {
                lap(gu, gv) -= e.conductance;
                lap(gv, gu) -= e.conductance;
            }
        }
        llt_.compute(lap);
        if (m > 0 && llt_.info() != Eigen::Success)
            throw SolverFailure("grounded Laplacian is not positive definite");
    }

    /// Effective resistance between any two vertices (unit current injection,
    /// two triangular solves).
    double resistance(VertexIndex x, VertexIndex y) const {
        if (x == y) return 0.0;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_ - 1);
        if (grounded_of_[x] >= 0) rhs(grounded_of_[x]) += 1.0;
        if (grounded_of_[y] >= 0) rhs(grounded_of_[y]) -= 1.0;
        Eigen::VectorXd u = llt_.solve(rhs);
        double ux = grounded_of_[x] >= 0 ? u(grounded_of_[x]) : 0.0;
        double uy = grounded_of_[y] >= 0 ? u(grounded_of_[y]) : 0.0;
        return ux - uy;
    }

    /// Inverse grounded Laplacian: the covariance of the GFF with boundary
    /// at the base vertex, indexed over V minus the ground.
    Eigen::MatrixXd covariance() const {
        int m = n_ - 1;
        return llt_.solve(Eigen::MatrixXd::Identity(m, m));
    }

    VertexIndex ground() const { return ground_; }
    int grounded_index(VertexIndex v) const { return grounded_of_[v]; }
    VertexIndex full_index(int g) const { return full_of_[g]; }

private:
    int n_;
    VertexIndex ground_;
    std::vector<int> grounded_of_;
    std::vector<VertexIndex> full_of_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// One-shot convenience; hold a GroundedSolver for repeated queries.
inline double effective_resistance(const ElectricalNetwork& net, const std::string& x,
                                   const std::string& y) {
    return GroundedSolver(net).resistance(net.index_of(x), net.index_of(y));
}

/// Predicted mean commute time c_tot * R_eff(x, y) for the continuous-time
/// walk; reduces to 2|E| R_eff on unit-conductance graphs.
inline double commute_time_identity_rhs(const ElectricalNetwork& net, const std::string& x,
                                        const std::string& y) {
    return net.total_conductance() * effective_resistance(net, x, y);
}

/// The N-fold edge refinement: every non-loop edge (x,y) becomes an N-step
/// path with sub-edge conductance N*c_xy, which preserves all effective
/// resistances between parent vertices. Self-loops stay attached to their
/// vertex with conductance N*c so that c_x scales uniformly to N*c_x.
class Refinement {
public:
    Refinement(const ElectricalNetwork& parent, int subdivisions)
        : parent_(parent), n_(subdivisions) {
        if (subdivisions < 2) throw ParseError("refinement requires N >= 2");
        std::vector<std::tuple<std::string, std::string, double>> child_edges;
        int edge_id = 0;
        for (const auto& e : parent.edges()) {
            if (e.u == e.v) {
                child_edges.emplace_back(parent.id_of(e.u), parent.id_of(e.v),
                                         n_ * e.conductance);
                continue;
            }
            edge_block_[{e.u, e.v}] = edge_id;
            const std::string& a = parent.id_of(e.u);
            const std::string& b = parent.id_of(e.v);
            std::string prev = a;
            for (int k = 1; k < n_; ++k) {
                std::string cur = a + "|" + b + ":" + std::to_string(k);
                child_edges.emplace_back(prev, cur, n_ * e.conductance);
                prev = std::move(cur);
            }
            child_edges.emplace_back(prev, b, n_ * e.conductance);
            ++edge_id;
        }
        child_.emplace(child_edges, parent.id_of(parent.base_vertex()));
        parent_of_child_.assign(child_->vertex_count(), -1);
        child_of_parent_.resize(parent.vertex_count());
        for (VertexIndex v = 0; v < parent.vertex_count(); ++v) {
            VertexIndex cv = child_->index_of(parent.id_of(v));
            child_of_parent_[v] = cv;
            parent_of_child_[cv] = v;
        }
    }

    const ElectricalNetwork& parent() const { return parent_; }
    const ElectricalNetwork& child() const { return *child_; }
    int subdivisions() const { return n_; }

    VertexIndex child_of_parent(VertexIndex parent_v) const { return child_of_parent_[parent_v]; }
    /// Parent index of a child vertex, or -1 for edge-interior vertices.
    VertexIndex parent_of_child(VertexIndex child_v) const { return parent_of_child_[child_v]; }

    /// Child index of v_{xy,k} (k = 0 is x, k = N is y); v_{xy,k} = v_{yx,N-k}.
    VertexIndex sub_vertex(VertexIndex x, VertexIndex y, int k) const {
        if (k == 0) return child_of_parent_[x];
        if (k == n_) return child_of_parent_[y];
        auto it = edge_block_.find({x, y});
        bool forward = true;
        if (it == edge_block_.end()) {
            it = edge_block_.find({y, x});
            forward = false;
        }
        if (it == edge_block_.end())
            throw UnknownBaseVertex("vertices are not adjacent in the parent graph");
        int i = forward ? k : n_ - k;
        const std::string& a = parent_.id_of(forward ? x : y);
        const std::string& b = parent_.id_of(forward ? y : x);
        return child_->index_of(a + "|" + b + ":" + std::to_string(i));
    }

private:
    ElectricalNetwork parent_;
    int n_;
    std::optional<ElectricalNetwork> child_;
    std::map<std::pair<VertexIndex, VertexIndex>, int> edge_block_;
    std::vector<VertexIndex> parent_of_child_;
    std::vector<VertexIndex> child_of_parent_;
};

inline Refinement refine(const ElectricalNetwork& net, int subdivisions) {
    return Refinement(net, subdivisions);
}

}  // namespace covertime

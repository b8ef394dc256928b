#pragma once

// Exact solvers behind exact_ot: a transportation simplex on the bipartite
// spanning-tree basis and a Dinic max-flow for bottleneck feasibility. Both
// are templated on the number type so that the same code runs in double and
// in exact rational arithmetic.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace ugw::detail {

template <class T>
struct DenseGrid {
    std::size_t rows = 0, cols = 0;
    std::vector<T> data;

    DenseGrid() = default;
    DenseGrid(std::size_t r, std::size_t c, const T& fill = T(0)) : rows(r), cols(c), data(r * c, fill) {}
    T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// Transportation simplex with an explicit basis of rows + cols - 1 cells
/// (degenerate zero-flow cells included), so the basis is always a spanning
/// tree. The basis survives between solve() calls: only the costs may
/// change, which keeps it primal feasible and makes re-solves cheap.
template <class T>
class TransportSimplex {
public:
    /// `tolerance` is the reduced-cost threshold relative to the cost scale
    /// (zero for exact arithmetic).
    TransportSimplex(std::vector<T> supply, std::vector<T> demand, T tolerance)
        : m_(supply.size()), n_(demand.size()), tol_(tolerance), flow_(m_, n_), basic_(m_, n_, 0) {
        if (m_ == 0 || n_ == 0) throw std::invalid_argument("empty transport problem");
        northwest_corner(std::move(supply), std::move(demand));
    }

    /// Re-optimises for a new m x n cost grid; returns the optimal cost.
    T solve(const DenseGrid<T>& cost) {
        T scale(1);
        for (const T& c : cost.data) {
            const T a = c < T(0) ? T(-c) : c;
            if (a > scale) scale = a;
        }
        const T eps = tol_ * scale;
        const std::size_t max_pivots = 100 * (m_ + n_) * (m_ + n_) + 10000;
        std::size_t degenerate_run = 0;
        for (std::size_t pivot = 0;; ++pivot) {
            if (pivot > max_pivots) throw std::runtime_error("transportation simplex did not converge");
            compute_potentials(cost);
            const bool bland = degenerate_run > m_ + n_;
            std::size_t ei = m_, ej = n_;
            T best(0);
            for (std::size_t i = 0; i < m_ && !(bland && ei < m_); ++i)
                for (std::size_t j = 0; j < n_; ++j) {
                    if (basic_(i, j)) continue;
                    const T r = cost(i, j) - row_pot_[i] - col_pot_[j];
                    if (r < -eps && (bland || r < best)) {
                        best = r;
                        ei = i;
                        ej = j;
                        if (bland) break;
                    }
                }
            if (ei == m_) break;
            const T theta = pivot_on(ei, ej, bland);
            degenerate_run = theta == T(0) ? degenerate_run + 1 : 0;
        }
        T total(0);
        for (const auto& cell : basis_) total += cost(cell.r, cell.c) * flow_(cell.r, cell.c);
        return total;
    }

    const DenseGrid<T>& flow() const { return flow_; }

private:
    struct Cell {
        std::size_t r, c;
    };

    void northwest_corner(std::vector<T> a, std::vector<T> b) {
        std::size_t i = 0, j = 0;
        while (i < m_ && j < n_) {
            const T x = a[i] < b[j] ? a[i] : b[j];
            add_basic(i, j, x);
            a[i] -= x;
            b[j] -= x;
            if (i == m_ - 1) {
                ++j;
            } else if (j == n_ - 1) {
                ++i;
            } else if (a[i] <= b[j]) {
                ++i;
            } else {
                ++j;
            }
        }
    }

    void add_basic(std::size_t i, std::size_t j, const T& x) {
        basis_.push_back({i, j});
        basic_(i, j) = 1;
        flow_(i, j) = x;
    }

    // Tree nodes: rows are 0..m-1, columns m..m+n-1. Edges are basis cells.
    void build_tree() {
        const std::size_t nodes = m_ + n_;
        adj_.assign(nodes, {});
        for (std::size_t e = 0; e < basis_.size(); ++e) {
            adj_[basis_[e].r].push_back(e);
            adj_[m_ + basis_[e].c].push_back(e);
        }
        parent_edge_.assign(nodes, basis_.size());
        depth_.assign(nodes, 0);
        order_.clear();
        std::vector<char> seen(nodes, 0);
        order_.push_back(0);
        seen[0] = 1;
        for (std::size_t k = 0; k < order_.size(); ++k) {
            const std::size_t v = order_[k];
            for (std::size_t e : adj_[v]) {
                const std::size_t w = other_end(e, v);
                if (seen[w]) continue;
                seen[w] = 1;
                parent_edge_[w] = e;
                depth_[w] = depth_[v] + 1;
                order_.push_back(w);
            }
        }
        if (order_.size() != nodes) throw std::runtime_error("transport basis is not a spanning tree");
    }

    std::size_t other_end(std::size_t e, std::size_t v) const {
        const std::size_t row = basis_[e].r, col = m_ + basis_[e].c;
        return v == row ? col : row;
    }

    void compute_potentials(const DenseGrid<T>& cost) {
        build_tree();
        row_pot_.assign(m_, T(0));
        col_pot_.assign(n_, T(0));
        for (std::size_t k = 1; k < order_.size(); ++k) {
            const std::size_t v = order_[k];
            const Cell& cell = basis_[parent_edge_[v]];
            if (v >= m_) {
                col_pot_[v - m_] = cost(cell.r, cell.c) - row_pot_[cell.r];
            } else {
                row_pot_[v] = cost(cell.r, cell.c) - col_pot_[cell.c];
            }
        }
    }

    T pivot_on(std::size_t ei, std::size_t ej, bool bland) {
        // Tree path from column node ej to row node ei.
        std::size_t a = m_ + ej, b = ei;
        std::vector<std::size_t> from_col, from_row;
        while (a != b) {
            if (depth_[a] >= depth_[b]) {
                from_col.push_back(parent_edge_[a]);
                a = other_end(parent_edge_[a], a);
            } else {
                from_row.push_back(parent_edge_[b]);
                b = other_end(parent_edge_[b], b);
            }
        }
        std::vector<std::size_t> path = from_col;
        path.insert(path.end(), from_row.rbegin(), from_row.rend());

        // Signs alternate -, +, -, ... starting next to the entering column.
        std::size_t leave = basis_.size();
        T theta(0);
        for (std::size_t k = 0; k < path.size(); k += 2) {
            const Cell& cell = basis_[path[k]];
            const T& x = flow_(cell.r, cell.c);
            bool better = leave == basis_.size() || x < theta;
            if (!better && bland && x == theta) {
                const Cell& cur = basis_[leave];
                better = cell.r * n_ + cell.c < cur.r * n_ + cur.c;
            }
            if (better) {
                theta = x;
                leave = path[k];
            }
        }
        for (std::size_t k = 0; k < path.size(); ++k) {
            const Cell& cell = basis_[path[k]];
            if (k % 2 == 0)
                flow_(cell.r, cell.c) -= theta;
            else
                flow_(cell.r, cell.c) += theta;
        }
        const Cell out = basis_[leave];
        flow_(out.r, out.c) = T(0);
        basic_(out.r, out.c) = 0;
        basis_[leave] = {ei, ej};
        basic_(ei, ej) = 1;
        flow_(ei, ej) = theta;
        return theta;
    }

    std::size_t m_, n_;
    T tol_;
    DenseGrid<T> flow_;
    DenseGrid<char> basic_;
    std::vector<Cell> basis_;
    std::vector<std::vector<std::size_t>> adj_;
    std::vector<std::size_t> parent_edge_, depth_, order_;
    std::vector<T> row_pot_, col_pot_;
};

/// Dinic max-flow on a small dense graph.
template <class T>
class MaxFlow {
public:
    explicit MaxFlow(std::size_t nodes) : graph_(nodes) {}

    std::size_t add_edge(std::size_t from, std::size_t to, T capacity) {
        graph_[from].push_back(edges_.size());
        edges_.push_back({to, capacity, T(0)});
        graph_[to].push_back(edges_.size());
        edges_.push_back({from, T(0), T(0)});
        return edges_.size() - 2;
    }

    T run(std::size_t source, std::size_t sink, T epsilon) {
        eps_ = epsilon;
        T total(0);
        while (bfs(source, sink)) {
            next_.assign(graph_.size(), 0);
            for (;;) {
                const T pushed = dfs(source, sink, infinity());
                if (!(pushed > eps_)) break;
                total += pushed;
            }
        }
        return total;
    }

    T flow_on(std::size_t edge) const { return edges_[edge].flow; }

private:
    struct Edge {
        std::size_t to;
        T capacity;
        T flow;
    };

    static T infinity() { return std::numeric_limits<double>::max(); }

    T residual(const Edge& e) const { return e.capacity - e.flow; }

    bool bfs(std::size_t s, std::size_t t) {
        level_.assign(graph_.size(), -1);
        std::queue<std::size_t> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            const std::size_t v = q.front();
            q.pop();
            for (std::size_t id : graph_[v]) {
                const Edge& e = edges_[id];
                if (level_[e.to] < 0 && residual(e) > eps_) {
                    level_[e.to] = level_[v] + 1;
                    q.push(e.to);
                }
            }
        }
        return level_[t] >= 0;
    }

    T dfs(std::size_t v, std::size_t t, T limit) {
        if (v == t) return limit;
        for (std::size_t& k = next_[v]; k < graph_[v].size(); ++k) {
            const std::size_t id = graph_[v][k];
            Edge& e = edges_[id];
            if (level_[e.to] != level_[v] + 1 || !(residual(e) > eps_)) continue;
            const T pushed = dfs(e.to, t, limit < residual(e) ? limit : residual(e));
            if (pushed > eps_) {
                e.flow += pushed;
                edges_[id ^ 1].flow -= pushed;
                return pushed;
            }
        }
        return T(0);
    }

    std::vector<std::vector<std::size_t>> graph_;
    std::vector<Edge> edges_;
    std::vector<int> level_;
    std::vector<std::size_t> next_;
    T eps_{0};
};

}  // namespace ugw::detail

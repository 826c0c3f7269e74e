#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mumetrics/distribution.hpp"

namespace mumetrics {

namespace detail {

struct TransportCell {
    int i;
    int j;
    double x;
};

}  // namespace detail

// Order-2 transport cost by explicit minimization over couplings: the
// transportation simplex with a northwest-corner start and MODI pricing.
// Entering and leaving picks follow Bland's rule, so degenerate pivots
// cannot cycle. Intended as an oracle for the quantile formula; capped at
// 64 atoms a side.
inline double w2_lp(const Distribution& p, const Distribution& q) {
    const size_t n = p.size();
    const size_t m = q.size();
    if (n > 64 || m > 64)
        throw std::invalid_argument("w2_lp: support larger than 64 atoms");

    std::vector<double> cost(n * m);
    double max_cost = 0.0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j) {
            double d = p.support()[i] - q.support()[j];
            cost[i * m + j] = d * d;
            max_cost = std::max(max_cost, d * d);
        }
    const double tol = 1e-12 * (1.0 + max_cost);

    // Northwest-corner start. Every step advances exactly one index, so the
    // basis has n + m - 1 cells and its row/col incidence graph is a tree.
    std::vector<detail::TransportCell> cells;
    cells.reserve(n + m - 1);
    std::vector<char> basic(n * m, 0);
    {
        size_t i = 0, j = 0;
        double a = p.probs()[0];
        double b = q.probs()[0];
        while (true) {
            double t = std::min(a, b);
            cells.push_back({int(i), int(j), t});
            basic[i * m + j] = 1;
            a -= t;
            b -= t;
            if (i + 1 == n && j + 1 == m) break;
            if ((a <= b && i + 1 < n) || j + 1 == m) {
                ++i;
                a = p.probs()[i];
            } else {
                ++j;
                b = q.probs()[j];
            }
        }
    }

    std::vector<double> u(n, 0.0), v(m, 0.0);
    std::vector<char> ru(n), rv(m);
    std::vector<std::vector<int>> row_cells(n), col_cells(m);
    std::vector<int> queue_nodes;

    const long max_pivots = 100000;
    for (long pivot = 0;; ++pivot) {
        if (pivot >= max_pivots)
            throw std::runtime_error("w2_lp: pivot limit hit");

        for (auto& r : row_cells) r.clear();
        for (auto& c : col_cells) c.clear();
        for (size_t k = 0; k < cells.size(); ++k) {
            row_cells[size_t(cells[k].i)].push_back(int(k));
            col_cells[size_t(cells[k].j)].push_back(int(k));
        }

        // duals on the basis tree; nodes 0..n-1 are rows, n.. are columns
        std::fill(ru.begin(), ru.end(), 0);
        std::fill(rv.begin(), rv.end(), 0);
        for (size_t seed = 0; seed < n; ++seed) {
            if (ru[seed]) continue;
            ru[seed] = 1;
            u[seed] = 0.0;
            queue_nodes.assign(1, int(seed));
            while (!queue_nodes.empty()) {
                int node = queue_nodes.back();
                queue_nodes.pop_back();
                if (node < int(n)) {
                    for (int k : row_cells[size_t(node)]) {
                        int j = cells[size_t(k)].j;
                        if (rv[size_t(j)]) continue;
                        rv[size_t(j)] = 1;
                        v[size_t(j)] = cost[size_t(node) * m + size_t(j)] - u[size_t(node)];
                        queue_nodes.push_back(int(n) + j);
                    }
                } else {
                    int j = node - int(n);
                    for (int k : col_cells[size_t(j)]) {
                        int i = cells[size_t(k)].i;
                        if (ru[size_t(i)]) continue;
                        ru[size_t(i)] = 1;
                        u[size_t(i)] = cost[size_t(i) * m + size_t(j)] - v[size_t(j)];
                        queue_nodes.push_back(i);
                    }
                }
            }
        }

        // Bland entering: first cell row-major with negative reduced cost
        int ei = -1, ej = -1;
        for (size_t i = 0; i < n && ei < 0; ++i)
            for (size_t j = 0; j < m; ++j) {
                if (basic[i * m + j]) continue;
                if (cost[i * m + j] - u[i] - v[j] < -tol) {
                    ei = int(i);
                    ej = int(j);
                    break;
                }
            }
        if (ei < 0) break;

        // unique tree path from row ei to column ej
        std::vector<int> parent_edge(n + m, -1), parent_node(n + m, -2);
        parent_node[size_t(ei)] = -1;
        queue_nodes.assign(1, ei);
        while (!queue_nodes.empty()) {
            int node = queue_nodes.back();
            queue_nodes.pop_back();
            if (node == int(n) + ej) break;
            if (node < int(n)) {
                for (int k : row_cells[size_t(node)]) {
                    int next = int(n) + cells[size_t(k)].j;
                    if (parent_node[size_t(next)] != -2) continue;
                    parent_node[size_t(next)] = node;
                    parent_edge[size_t(next)] = k;
                    queue_nodes.push_back(next);
                }
            } else {
                for (int k : col_cells[size_t(node) - n]) {
                    int next = cells[size_t(k)].i;
                    if (parent_node[size_t(next)] != -2) continue;
                    parent_node[size_t(next)] = node;
                    parent_edge[size_t(next)] = k;
                    queue_nodes.push_back(next);
                }
            }
        }
        if (parent_node[n + size_t(ej)] == -2)
            throw std::runtime_error("w2_lp: basis lost tree connectivity");

        std::vector<int> path;
        for (int node = int(n) + ej; parent_node[size_t(node)] != -1; node = parent_node[size_t(node)])
            path.push_back(parent_edge[size_t(node)]);
        std::reverse(path.begin(), path.end());

        // cycle signs alternate; path[0] shares the entering row, so odd
        // positions (0, 2, ...) give mass back and even take it
        double theta = cells[size_t(path[0])].x;
        int leave_pos = 0;
        for (size_t t = 2; t < path.size(); t += 2)
            if (cells[size_t(path[t])].x < theta) {
                theta = cells[size_t(path[t])].x;
                leave_pos = int(t);
            }
        for (size_t t = 0; t < path.size(); ++t) {
            double& x = cells[size_t(path[t])].x;
            x += (t % 2 == 0) ? -theta : theta;
        }
        int leave_cell = path[size_t(leave_pos)];
        basic[size_t(cells[size_t(leave_cell)].i) * m + size_t(cells[size_t(leave_cell)].j)] = 0;
        cells[size_t(leave_cell)] = {ei, ej, theta};
        basic[size_t(ei) * m + size_t(ej)] = 1;
    }

    double value = 0.0;
    for (const auto& cell : cells)
        value += std::max(0.0, cell.x) * cost[size_t(cell.i) * m + size_t(cell.j)];
    return std::sqrt(std::max(0.0, value));
}

}  // namespace mumetrics

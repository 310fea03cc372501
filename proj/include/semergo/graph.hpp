#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "semergo/numtheory.hpp"
#include "semergo/semigroup.hpp"

namespace semergo {

// ---------------------------------------------------------------------------
// Finite connected undirected graph with its non-backtracking (oriented edge)
// adjacency matrix. Oriented edge 2i is u->v for undirected edge i = {u, v},
// and 2i+1 is its reversal. B[e][f] = 1 iff head(e) == tail(f) and f is not
// the reversal of e; traces of powers of B count closed non-backtracking
// paths, and Mobius inversion of those counts gives the prime (primitive
// cycle class) counts.
// ---------------------------------------------------------------------------
class GraphSpec {
public:
    GraphSpec(int vertices, std::vector<std::pair<int, int>> edges)
        : vertices_(vertices), edges_(std::move(edges)) {
        if (vertices_ <= 0) throw Error("graph needs at least one vertex");
        for (auto& [u, v] : edges_) {
            if (u < 0 || v < 0 || u >= vertices_ || v >= vertices_)
                throw Error("edge endpoint out of range");
            if (u == v) throw Error("self-loops are not supported");
        }
        check_connected();
        build_edge_matrix();
    }

    // whitespace-separated "u v" lines; vertex ids are arbitrary nonnegative
    // integers, renumbered densely
    static GraphSpec parse_edge_list(std::istream& in) {
        std::vector<std::pair<int, int>> edges;
        std::vector<int> ids;
        int u, v;
        while (in >> u >> v) {
            edges.emplace_back(u, v);
            ids.push_back(u);
            ids.push_back(v);
        }
        if (edges.empty()) throw Error("empty edge list");
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        for (auto& [a, b] : edges) {
            a = static_cast<int>(std::lower_bound(ids.begin(), ids.end(), a) - ids.begin());
            b = static_cast<int>(std::lower_bound(ids.begin(), ids.end(), b) - ids.begin());
        }
        return GraphSpec(static_cast<int>(ids.size()), std::move(edges));
    }

    static GraphSpec complete(int n) {
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
        return GraphSpec(n, std::move(edges));
    }

    int vertices() const { return vertices_; }
    int oriented_edges() const { return 2 * static_cast<int>(edges_.size()); }
    const std::vector<std::vector<std::uint8_t>>& edge_matrix() const { return matrix_; }

    int edge_tail(int e) const {
        auto [u, v] = edges_[static_cast<std::size_t>(e / 2)];
        return e % 2 == 0 ? u : v;
    }
    int edge_head(int e) const {
        auto [u, v] = edges_[static_cast<std::size_t>(e / 2)];
        return e % 2 == 0 ? v : u;
    }
    static int edge_reverse(int e) { return e ^ 1; }

    // N_m = tr(B^m) for m = 1..nmax, exact.
    std::vector<BigInt> closed_path_counts(int nmax) const {
        int n = oriented_edges();
        std::vector<std::vector<BigInt>> power(static_cast<std::size_t>(n),
                                               std::vector<BigInt>(static_cast<std::size_t>(n)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) power[i][j] = BigInt(matrix_[i][j]);
        std::vector<BigInt> traces;
        for (int m = 1; m <= nmax; ++m) {
            if (m > 1) {
                std::vector<std::vector<BigInt>> next(
                    static_cast<std::size_t>(n), std::vector<BigInt>(static_cast<std::size_t>(n)));
                for (int i = 0; i < n; ++i) {
                    for (int l = 0; l < n; ++l) {
                        const BigInt& x = power[i][l];
                        if (x.is_zero()) continue;
                        for (int j = 0; j < n; ++j) {
                            if (matrix_[l][j]) next[i][j] += x;
                        }
                    }
                }
                power = std::move(next);
            }
            BigInt tr(0);
            for (int i = 0; i < n; ++i) tr += power[i][i];
            traces.push_back(std::move(tr));
        }
        return traces;
    }

    // Delta_G = gcd of the path lengths m <= 2|E| with N_m > 0 (0 if acyclic).
    int delta() const {
        auto traces = closed_path_counts(std::max(2, oriented_edges()));
        int g = 0;
        for (std::size_t i = 0; i < traces.size(); ++i) {
            if (!traces[i].is_zero()) g = std::gcd(g, static_cast<int>(i + 1));
        }
        return g;
    }

    // Perron growth rate 1/R_G estimated from the exact trace sequence.
    double perron() const {
        int top = std::max(8, std::min(2 * oriented_edges(), 48));
        auto traces = closed_path_counts(top);
        // use the largest even index with a positive trace: even powers are
        // immune to spectral sign cancellation
        for (int m = top - top % 2; m >= 2; m -= 2) {
            const BigInt& t = traces[static_cast<std::size_t>(m - 1)];
            if (!t.is_zero()) {
                long e2 = 0;
                double mant = t.to_double_scaled(e2);
                double ln = std::log(std::fabs(mant)) + static_cast<double>(e2) * std::log(2.0);
                return std::exp(ln / m);
            }
        }
        return 0.0;
    }

    // Primitive cycle classes of length m in canonical (lexicographically
    // smallest edge sequence) order. Budget counts path extensions.
    std::vector<std::vector<int>> primitive_cycles(int m, std::size_t budget = 1'000'000) const {
        std::vector<std::vector<int>> classes;
        std::size_t work = 0;
        int n = oriented_edges();
        std::vector<int> path;
        for (int start = 0; start < n; ++start) {
            path.assign(1, start);
            cycle_dfs(start, m, path, work, budget, classes);
        }
        std::sort(classes.begin(), classes.end());
        return classes;
    }

private:
    int vertices_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<std::uint8_t>> matrix_;

    void check_connected() const {
        if (edges_.empty() && vertices_ > 1) throw Disconnected("graph has no edges");
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(vertices_));
        for (auto& [u, v] : edges_) {
            adj[static_cast<std::size_t>(u)].push_back(v);
            adj[static_cast<std::size_t>(v)].push_back(u);
        }
        std::vector<bool> seen(static_cast<std::size_t>(vertices_), false);
        std::vector<int> stack{0};
        seen[0] = true;
        int found = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : adj[static_cast<std::size_t>(u)]) {
                if (!seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = true;
                    ++found;
                    stack.push_back(v);
                }
            }
        }
        if (found != vertices_) throw Disconnected("graph is not connected");
    }

    void build_edge_matrix() {
        int n = oriented_edges();
        matrix_.assign(static_cast<std::size_t>(n),
                       std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0));
        for (int e = 0; e < n; ++e) {
            for (int f = 0; f < n; ++f) {
                if (f == edge_reverse(e)) continue;
                if (edge_head(e) == edge_tail(f)) matrix_[e][f] = 1;
            }
        }
    }

    void cycle_dfs(int start, int m, std::vector<int>& path, std::size_t& work,
                   std::size_t budget, std::vector<std::vector<int>>& classes) const {
        if (static_cast<int>(path.size()) == m) {
            int last = path.back();
            // close the cycle: start must follow last without backtracking
            if (matrix_[static_cast<std::size_t>(last)][static_cast<std::size_t>(start)]) {
                if (is_canonical_primitive(path)) classes.push_back(path);
            }
            return;
        }
        int cur = path.back();
        for (int next = 0; next < oriented_edges(); ++next) {
            if (!matrix_[static_cast<std::size_t>(cur)][static_cast<std::size_t>(next)]) continue;
            if (next < start) continue;  // canonical rotation starts at the minimum
            if (++work > budget)
                throw CountOnly("cycle enumeration budget exhausted");
            path.push_back(next);
            cycle_dfs(start, m, path, work, budget, classes);
            path.pop_back();
        }
    }

    static bool is_canonical_primitive(const std::vector<int>& c) {
        std::size_t m = c.size();
        // primitive: no proper period
        for (std::size_t p = 1; p < m; ++p) {
            if (m % p) continue;
            bool periodic = true;
            for (std::size_t i = p; i < m && periodic; ++i) periodic = c[i] == c[i - p];
            if (periodic) return false;
        }
        // canonical: lexicographically minimal among rotations
        for (std::size_t r = 1; r < m; ++r) {
            for (std::size_t i = 0; i < m; ++i) {
                int a = c[(r + i) % m], b = c[i];
                if (a != b) {
                    if (a < b) return false;
                    break;
                }
            }
        }
        return true;
    }
};

// pi(1..n) from Mobius inversion of the closed-path counts, exact integers.
inline std::vector<BigInt> graph_pi(const GraphSpec& g, int nmax) {
    if (nmax < 1) throw Error("graph_pi requires n >= 1");
    auto traces = g.closed_path_counts(nmax);
    auto mu = mobius_sieve(nmax);
    std::vector<BigInt> out;
    for (int m = 1; m <= nmax; ++m) {
        BigInt s(0);
        for (int d : divisors_of(m))
            s += BigInt(mu[static_cast<std::size_t>(m / d)]) * traces[static_cast<std::size_t>(d - 1)];
        BigInt q, r;
        BigInt::divmod(s, BigInt(m), q, r);
        if (!r.is_zero()) throw Error("Mobius inversion produced a non-integer count");
        out.push_back(std::move(q));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Path semigroup of a finite graph: primes are primitive cycle classes.
// Counting always works through traces; listing falls back to budgeted
// enumeration and reports CountOnly beyond it.
// ---------------------------------------------------------------------------
class GraphPathInstance : public Instance {
public:
    explicit GraphPathInstance(GraphSpec spec, int pi_max = 64,
                               std::size_t cycle_budget = 1'000'000)
        : spec_(std::move(spec)),
          pi_max_(pi_max),
          budget_(cycle_budget),
          pi_(graph_pi(spec_, pi_max)),
          delta_(spec_.delta()),
          perron_(spec_.perron()) {}

    const GraphSpec& spec() const { return spec_; }
    int delta() const { return delta_; }

    std::string kind() const override { return "graph"; }
    std::string description() const override {
        return "graph:v=" + std::to_string(spec_.vertices()) +
               ",e=" + std::to_string(spec_.oriented_edges() / 2);
    }
    bool q_is_integer() const override { return false; }
    double q_real() const override { return perron_; }

    int pi_max_degree() const override { return pi_max_; }
    BigInt pi(int degree) const override {
        if (degree < 1 || degree > pi_max_)
            throw Error("pi(" + std::to_string(degree) + ") outside computed range");
        return pi_[static_cast<std::size_t>(degree - 1)];
    }
    bool primes_listable(int degree) const override {
        return pi(degree).fits_u64() && pi(degree).to_u64() <= (1u << 20);
    }
    std::vector<PrimeId> primes(int degree) const override {
        auto classes = spec_.primitive_cycles(degree, budget_);
        if (BigInt(static_cast<unsigned long long>(classes.size())) != pi(degree))
            throw Error("cycle enumeration disagrees with trace counts");
        std::vector<PrimeId> out;
        for (std::size_t i = 0; i < classes.size(); ++i)
            out.push_back(PrimeId{degree, static_cast<std::uint64_t>(i)});
        return out;
    }
    bool classical() const override { return delta_ == 1; }

private:
    GraphSpec spec_;
    int pi_max_;
    std::size_t budget_;
    std::vector<BigInt> pi_;
    int delta_;
    double perron_;
};

}  // namespace semergo

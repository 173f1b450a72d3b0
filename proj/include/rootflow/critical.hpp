#pragma once

// Zeros of P^(m) computed directly from the zero multiset of P, one
// derivative at a time. The critical points of P are the multiple zeros of P
// (multiplicity lowered by one) together with the zeros of
// f(z) = sum_j mu_j / (z - q_j). Working from the zeros avoids the monomial
// basis, whose conditioning is exponentially bad for i.i.d. zeros.

#include "rootflow/numeric.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace rootflow {

struct FlowStats {
    std::int64_t steps = 0;
    std::int64_t sweeps = 0;       // Aberth sweeps or Newton evaluations, summed
    int max_sweeps_in_step = 0;
    std::int64_t unconverged = 0;  // points that hit the sweep cap
};

class ComplexRootFlow {
public:
    explicit ComplexRootFlow(std::span<const cplx> roots, double tol = 1e-12, int max_sweeps = 200);

    void step();
    void advance(std::int64_t m) {
        for (std::int64_t i = 0; i < m; ++i) step();
    }

    std::int64_t degree() const { return degree_; }
    // Zeros repeated according to multiplicity.
    std::vector<cplx> roots() const;
    const FlowStats& stats() const { return stats_; }

private:
    void merge_duplicates();

    std::vector<double> re_, im_, mult_;
    std::int64_t degree_ = 0;
    double tol_;
    int max_sweeps_;
    FlowStats stats_;
};

// Real zeros with multiplicities, kept sorted.
class RealRootFlow {
public:
    struct Options {
        double tol = 1e-14;          // relative to the gap width
        int max_newton = 60;
        std::size_t fast_threshold = 1500;  // distinct points above which the multipole sum is used
    };

    RealRootFlow(std::span<const double> points, std::span<const std::int64_t> multiplicities, Options opt);
    explicit RealRootFlow(std::span<const double> roots, Options opt);
    explicit RealRootFlow(std::span<const double> roots) : RealRootFlow(roots, Options{}) {}

    void step();
    void advance(std::int64_t m) {
        for (std::int64_t i = 0; i < m; ++i) step();
    }

    std::int64_t degree() const { return degree_; }
    const std::vector<double>& points() const { return pts_; }
    const std::vector<std::int64_t>& multiplicities() const { return mult_; }
    std::vector<double> roots() const;
    const FlowStats& stats() const { return stats_; }

private:
    void normalize();

    std::vector<double> pts_;
    std::vector<std::int64_t> mult_;
    std::int64_t degree_ = 0;
    Options opt_;
    FlowStats stats_;
};

// Fast evaluation of R(x) = sum_{j != k, k+1} w_j / (x - r_j) and R'(x) for
// x in the gap (r_k, r_{k+1}) of sorted points, by a one-dimensional
// multipole method. Far field is accurate to roughly theta^order relative.
class LineCauchySum {
public:
    LineCauchySum(std::span<const double> points, std::span<const double> weights, int order = 40,
                  double theta = 0.5, int leaf_size = 32);

    struct Value {
        double r;
        double dr;
    };
    Value in_gap(std::size_t k, double x) const;

private:
    struct Node {
        std::size_t lo, hi;
        int left = -1, right = -1;
        double sc, sr;  // source box center / radius
        double tc, tr;  // target box center / radius (covers the gap after hi-1)
        bool leaf() const { return left < 0; }
    };
    int build(std::size_t lo, std::size_t hi);
    void interact(int t, int s);
    void m2l(int t, int s);
    void downward(int node);

    std::span<const double> pts_, w_;
    int order_;
    double theta_;
    int leaf_size_;
    std::vector<Node> nodes_;
    std::vector<double> multipole_, local_;  // order_ coefficients per node
    std::vector<std::vector<int>> near_;     // per node (leaves only)
    std::vector<int> leaf_of_;               // point index -> leaf node
    std::vector<double> binom_;              // (2*order) x (2*order)
};

}  // namespace rootflow

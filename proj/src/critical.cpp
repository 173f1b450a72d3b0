#include "rootflow/critical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace rootflow {

namespace {

struct Sums {
    double ar = 0, ai = 0;  // sum w/(z-p)
    double br = 0, bi = 0;  // sum w/(z-p)^2
};

// Sums over j in [lo, hi); written so that the loop vectorizes.
void cauchy_sums(const double* pr, const double* pi, const double* w, std::size_t lo, std::size_t hi, double zr,
                 double zi, Sums& s) {
    double ar = 0, ai = 0, br = 0, bi = 0;
#pragma omp simd reduction(+ : ar, ai, br, bi)
    for (std::size_t j = lo; j < hi; ++j) {
        const double dx = zr - pr[j];
        const double dy = zi - pi[j];
        const double inv = 1.0 / (dx * dx + dy * dy);
        const double u = dx * inv;
        const double v = -dy * inv;
        ar += w[j] * u;
        ai += w[j] * v;
        br += w[j] * (u * u - v * v);
        bi += w[j] * (2.0 * u * v);
    }
    s.ar += ar;
    s.ai += ai;
    s.br += br;
    s.bi += bi;
}

// sum 1/(z - p_j) over j in [lo, hi)
cplx reciprocal_sum(const double* pr, const double* pi, std::size_t lo, std::size_t hi, double zr, double zi) {
    double ar = 0, ai = 0;
#pragma omp simd reduction(+ : ar, ai)
    for (std::size_t j = lo; j < hi; ++j) {
        const double dx = zr - pr[j];
        const double dy = zi - pi[j];
        const double inv = 1.0 / (dx * dx + dy * dy);
        ar += dx * inv;
        ai -= dy * inv;
    }
    return {ar, ai};
}

void real_sums(const double* p, const double* w, std::size_t lo, std::size_t hi, double x, double& r, double& dr) {
    double a = 0, b = 0;
#pragma omp simd reduction(+ : a, b)
    for (std::size_t j = lo; j < hi; ++j) {
        const double inv = 1.0 / (x - p[j]);
        a += w[j] * inv;
        b -= w[j] * inv * inv;
    }
    r += a;
    dr += b;
}

}  // namespace

// ---------------------------------------------------------------------------

ComplexRootFlow::ComplexRootFlow(std::span<const cplx> roots, double tol, int max_sweeps)
    : tol_(tol), max_sweeps_(max_sweeps) {
    if (roots.empty()) throw std::invalid_argument("ComplexRootFlow: no roots");
    for (const cplx& r : roots) {
        if (!std::isfinite(r.real()) || !std::isfinite(r.imag()))
            throw std::invalid_argument("ComplexRootFlow: non-finite root");
        re_.push_back(r.real());
        im_.push_back(r.imag());
        mult_.push_back(1.0);
    }
    degree_ = static_cast<std::int64_t>(roots.size());
    merge_duplicates();
}

void ComplexRootFlow::merge_duplicates() {
    std::vector<std::size_t> order(re_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (re_[a] != re_[b]) return re_[a] < re_[b];
        return im_[a] < im_[b];
    });
    std::vector<double> re, im, mu;
    for (std::size_t i : order) {
        if (mult_[i] <= 0) continue;
        if (!re.empty() && re.back() == re_[i] && im.back() == im_[i]) {
            mu.back() += mult_[i];
            continue;
        }
        re.push_back(re_[i]);
        im.push_back(im_[i]);
        mu.push_back(mult_[i]);
    }
    re_ = std::move(re);
    im_ = std::move(im);
    mult_ = std::move(mu);
}

std::vector<cplx> ComplexRootFlow::roots() const {
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(degree_));
    for (std::size_t i = 0; i < re_.size(); ++i)
        for (int k = 0; k < static_cast<int>(mult_[i]); ++k) out.emplace_back(re_[i], im_[i]);
    return out;
}

void ComplexRootFlow::step() {
    if (degree_ == 0) throw std::logic_error("ComplexRootFlow: derivative of a constant");
    ++stats_.steps;
    const std::size_t D = re_.size();
    if (D == 1) {
        mult_[0] -= 1.0;
        --degree_;
        if (mult_[0] == 0.0) {
            re_.clear();
            im_.clear();
            mult_.clear();
        }
        return;
    }
    const double* qr = re_.data();
    const double* qi = im_.data();
    const double* mu = mult_.data();

    // Starting points: each zero q_k pairs with the nearby zero of
    // mu_k/(z-q_k) + f_k(q_k); the least paired one is left out.
    std::vector<double> wr, wi;
    wr.reserve(D);
    wi.reserve(D);
    std::size_t drop = 0;
    double worst = -1.0;
    std::vector<cplx> offset(D);
    for (std::size_t k = 0; k < D; ++k) {
        Sums s;
        cauchy_sums(qr, qi, mu, 0, k, qr[k], qi[k], s);
        cauchy_sums(qr, qi, mu, k + 1, D, qr[k], qi[k], s);
        const cplx f(s.ar, s.ai);
        const double size = f == cplx{} ? std::numeric_limits<double>::infinity() : mu[k] / std::abs(f);
        offset[k] = f == cplx{} ? cplx{} : mu[k] / f;
        if (size > worst) {
            worst = size;
            drop = k;
        }
    }
    for (std::size_t k = 0; k < D; ++k) {
        if (k == drop) continue;
        wr.push_back(qr[k] - offset[k].real());
        wi.push_back(qi[k] - offset[k].imag());
    }

    std::vector<std::size_t> multiple;
    for (std::size_t j = 0; j < D; ++j)
        if (mu[j] >= 2.0) multiple.push_back(j);

    const std::size_t M = wr.size();
    std::vector<double> nr = wr, ni = wi;
    std::vector<char> done(M, 0);
    std::size_t remaining = M;
    int sweep = 0;
    while (remaining > 0 && sweep < max_sweeps_) {
        ++sweep;
        for (std::size_t k = 0; k < M; ++k) {
            if (done[k]) continue;
            Sums s;
            cauchy_sums(qr, qi, mu, 0, D, wr[k], wi[k], s);
            const cplx f(s.ar, s.ai);
            if (f == cplx{}) {
                done[k] = 1;
                --remaining;
                continue;
            }
            const cplx g(s.br, s.bi);  // equals -f'
            // log-derivative of the polynomial whose zeros are the unknowns
            cplx L = f - g / f;
            for (std::size_t j : multiple) L -= (mu[j] - 1.0) / (cplx(wr[k], wi[k]) - cplx(qr[j], qi[j]));
            const cplx rep = reciprocal_sum(wr.data(), wi.data(), 0, k, wr[k], wi[k]) +
                             reciprocal_sum(wr.data(), wi.data(), k + 1, M, wr[k], wi[k]);
            const cplx den = L - rep;
            const cplx delta = 1.0 / den;
            if (!std::isfinite(delta.real()) || !std::isfinite(delta.imag())) continue;
            nr[k] = wr[k] - delta.real();
            ni[k] = wi[k] - delta.imag();
            if (std::abs(delta) < tol_ * std::max(1.0, std::hypot(wr[k], wi[k]))) {
                done[k] = 1;
                --remaining;
            }
        }
        wr = nr;
        wi = ni;
    }
    stats_.sweeps += sweep;
    stats_.max_sweeps_in_step = std::max(stats_.max_sweeps_in_step, sweep);
    stats_.unconverged += static_cast<std::int64_t>(remaining);

    for (std::size_t j = 0; j < D; ++j) mult_[j] -= 1.0;
    for (std::size_t k = 0; k < M; ++k) {
        re_.push_back(wr[k]);
        im_.push_back(wi[k]);
        mult_.push_back(1.0);
    }
    --degree_;
    merge_duplicates();
}

// ---------------------------------------------------------------------------

RealRootFlow::RealRootFlow(std::span<const double> points, std::span<const std::int64_t> multiplicities,
                           Options opt)
    : pts_(points.begin(), points.end()), mult_(multiplicities.begin(), multiplicities.end()), opt_(opt) {
    if (pts_.size() != mult_.size()) throw std::invalid_argument("RealRootFlow: size mismatch");
    for (std::size_t i = 0; i < pts_.size(); ++i) {
        if (!std::isfinite(pts_[i])) throw std::invalid_argument("RealRootFlow: non-finite point");
        if (mult_[i] < 0) throw std::invalid_argument("RealRootFlow: negative multiplicity");
    }
    normalize();
    if (degree_ == 0) throw std::invalid_argument("RealRootFlow: no roots");
}

RealRootFlow::RealRootFlow(std::span<const double> roots, Options opt)
    : RealRootFlow(roots, std::vector<std::int64_t>(roots.size(), 1), opt) {}

void RealRootFlow::normalize() {
    std::vector<std::size_t> order(pts_.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts_[a] < pts_[b]; });
    std::vector<double> p;
    std::vector<std::int64_t> m;
    for (std::size_t i : order) {
        if (mult_[i] == 0) continue;
        if (!p.empty() && p.back() == pts_[i]) {
            m.back() += mult_[i];
            continue;
        }
        p.push_back(pts_[i]);
        m.push_back(mult_[i]);
    }
    pts_ = std::move(p);
    mult_ = std::move(m);
    degree_ = std::accumulate(mult_.begin(), mult_.end(), std::int64_t{0});
}

std::vector<double> RealRootFlow::roots() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(degree_));
    for (std::size_t i = 0; i < pts_.size(); ++i) out.insert(out.end(), static_cast<std::size_t>(mult_[i]), pts_[i]);
    return out;
}

void RealRootFlow::step() {
    if (degree_ == 0) throw std::logic_error("RealRootFlow: derivative of a constant");
    ++stats_.steps;
    const std::size_t D = pts_.size();
    std::vector<double> crit;
    if (D > 1) {
        std::vector<double> w(mult_.begin(), mult_.end());
        const double* p = pts_.data();
        std::unique_ptr<LineCauchySum> fast;
        if (D >= opt_.fast_threshold) fast = std::make_unique<LineCauchySum>(pts_, w);
        auto eval = [&](std::size_t k, double x) -> LineCauchySum::Value {
            if (fast) return fast->in_gap(k, x);
            double r = 0, dr = 0;
            real_sums(p, w.data(), 0, k, x, r, dr);
            real_sums(p, w.data(), k + 2, D, x, r, dr);
            return {r, dr};
        };

        crit.resize(D - 1);
        int worst = 0;
        for (std::size_t k = 0; k + 1 < D; ++k) {
            // Newton on h(u) = ma(w-u) - mb u + u(w-u)R(a+u), which has no
            // poles in the gap and changes sign exactly once.
            const double a = p[k], gap = p[k + 1] - p[k];
            const double ma = w[k], mb = w[k + 1];
            const double rm = eval(k, a + 0.5 * gap).r;
            double u = ma * gap / (ma + mb);
            if (rm != 0.0) {
                const double qa = -rm, qb = rm * gap - ma - mb, qc = ma * gap;
                const double disc = std::sqrt(std::max(0.0, qb * qb - 4.0 * qa * qc));
                const double q = -0.5 * (qb + std::copysign(disc, qb));
                const double u1 = q / qa, u2 = q != 0.0 ? qc / q : -1.0;
                if (u1 > 0 && u1 < gap) u = u1;
                else if (u2 > 0 && u2 < gap) u = u2;
            }
            double lo = 0.0, hi = gap;
            int it = 1;
            for (; it < opt_.max_newton; ++it) {
                const auto v = eval(k, a + u);
                const double h = ma * (gap - u) - mb * u + u * (gap - u) * v.r;
                if (h > 0) lo = u;
                else if (h < 0) hi = u;
                else break;
                const double dh = -ma - mb + (gap - 2.0 * u) * v.r + u * (gap - u) * v.dr;
                double un = u - h / dh;
                if (!(un > lo && un < hi)) un = 0.5 * (lo + hi);
                const double step = std::abs(un - u);
                u = un;
                if (step <= opt_.tol * gap || hi - lo <= opt_.tol * gap) break;
            }
            if (it >= opt_.max_newton) ++stats_.unconverged;
            worst = std::max(worst, it + 1);
            stats_.sweeps += it + 1;
            crit[k] = a + u;
        }
        stats_.max_sweeps_in_step = std::max(stats_.max_sweeps_in_step, worst);
    }

    std::vector<double> np;
    std::vector<std::int64_t> nm;
    np.reserve(2 * D);
    nm.reserve(2 * D);
    for (std::size_t j = 0; j < D; ++j) {
        if (mult_[j] > 1) {
            np.push_back(pts_[j]);
            nm.push_back(mult_[j] - 1);
        }
        if (j + 1 < D) {
            np.push_back(crit[j]);
            nm.push_back(1);
        }
    }
    pts_ = std::move(np);
    mult_ = std::move(nm);
    normalize();
}

// ---------------------------------------------------------------------------

LineCauchySum::LineCauchySum(std::span<const double> points, std::span<const double> weights, int order,
                             double theta, int leaf_size)
    : pts_(points), w_(weights), order_(order), theta_(theta), leaf_size_(leaf_size) {
    const std::size_t n = pts_.size();
    if (n == 0 || w_.size() != n) throw std::invalid_argument("LineCauchySum: bad input");
    const int B = 2 * order_;
    binom_.assign(static_cast<std::size_t>(B * B), 0.0);
    for (int i = 0; i < B; ++i) {
        binom_[static_cast<std::size_t>(i * B)] = 1.0;
        for (int j = 1; j <= i; ++j)
            binom_[static_cast<std::size_t>(i * B + j)] =
                binom_[static_cast<std::size_t>((i - 1) * B + j - 1)] + (j < i ? binom_[static_cast<std::size_t>((i - 1) * B + j)] : 0.0);
    }
    leaf_of_.assign(n, -1);
    nodes_.reserve(4 * n / static_cast<std::size_t>(leaf_size_) + 4);
    build(0, n);
    multipole_.assign(nodes_.size() * static_cast<std::size_t>(order_), 0.0);
    local_.assign(nodes_.size() * static_cast<std::size_t>(order_), 0.0);
    near_.assign(nodes_.size(), {});

    for (std::size_t id = 0; id < nodes_.size(); ++id) {
        const Node& nd = nodes_[id];
        const double scale = nd.sr > 0 ? nd.sr : 1.0;
        double* a = &multipole_[id * static_cast<std::size_t>(order_)];
        for (std::size_t j = nd.lo; j < nd.hi; ++j) {
            const double t = (pts_[j] - nd.sc) / scale;
            double pw = w_[j];
            for (int p = 0; p < order_; ++p) {
                a[p] += pw;
                pw *= t;
            }
        }
    }
    interact(0, 0);
    downward(0);
}

int LineCauchySum::build(std::size_t lo, std::size_t hi) {
    const int id = static_cast<int>(nodes_.size());
    const std::size_t n = pts_.size();
    Node nd;
    nd.lo = lo;
    nd.hi = hi;
    const double s0 = pts_[lo], s1 = pts_[hi - 1], t1 = pts_[std::min(hi, n - 1)];
    nd.sc = 0.5 * (s0 + s1);
    nd.sr = 0.5 * (s1 - s0);
    nd.tc = 0.5 * (s0 + t1);
    nd.tr = 0.5 * (t1 - s0);
    nodes_.push_back(nd);
    if (hi - lo <= static_cast<std::size_t>(leaf_size_)) {
        for (std::size_t j = lo; j < hi; ++j) leaf_of_[j] = id;
        return id;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    const int l = build(lo, mid);
    const int r = build(mid, hi);
    nodes_[static_cast<std::size_t>(id)].left = l;
    nodes_[static_cast<std::size_t>(id)].right = r;
    return id;
}

void LineCauchySum::interact(int t, int s) {
    const Node& T = nodes_[static_cast<std::size_t>(t)];
    const Node& S = nodes_[static_cast<std::size_t>(s)];
    const double dist = std::abs(T.tc - S.sc);
    if (dist > 0 && T.tr + S.sr <= theta_ * dist) {
        m2l(t, s);
        return;
    }
    if (T.leaf() && S.leaf()) {
        near_[static_cast<std::size_t>(t)].push_back(s);
        return;
    }
    if (S.leaf() || (!T.leaf() && T.tr >= S.sr)) {
        interact(T.left, s);
        interact(T.right, s);
    } else {
        interact(t, S.left);
        interact(t, S.right);
    }
}

void LineCauchySum::m2l(int t, int s) {
    const Node& T = nodes_[static_cast<std::size_t>(t)];
    const Node& S = nodes_[static_cast<std::size_t>(s)];
    const double d = T.tc - S.sc;
    const double alpha = (S.sr > 0 ? S.sr : 1.0) / d;
    const double beta = -(T.tr > 0 ? T.tr : 1.0) / d;
    const double* a = &multipole_[static_cast<std::size_t>(s) * static_cast<std::size_t>(order_)];
    double* b = &local_[static_cast<std::size_t>(t) * static_cast<std::size_t>(order_)];
    const int B = 2 * order_;
    std::vector<double> tmp(static_cast<std::size_t>(order_));
    double pw = 1.0;
    for (int p = 0; p < order_; ++p) {
        tmp[static_cast<std::size_t>(p)] = a[p] * pw;
        pw *= alpha;
    }
    double bl = 1.0 / d;
    for (int l = 0; l < order_; ++l) {
        double sum = 0.0;
        for (int p = 0; p < order_; ++p) sum += binom_[static_cast<std::size_t>((p + l) * B + l)] * tmp[static_cast<std::size_t>(p)];
        b[l] += bl * sum;
        bl *= beta;
    }
}

void LineCauchySum::downward(int id) {
    const Node& P = nodes_[static_cast<std::size_t>(id)];
    if (P.leaf()) return;
    const double* bp = &local_[static_cast<std::size_t>(id) * static_cast<std::size_t>(order_)];
    const double ps = P.tr > 0 ? P.tr : 1.0;
    for (int c : {P.left, P.right}) {
        const Node& C = nodes_[static_cast<std::size_t>(c)];
        const double cs = C.tr > 0 ? C.tr : 1.0;
        const double shift = (C.tc - P.tc) / ps;
        const double ratio = cs / ps;
        std::vector<double> q(bp, bp + order_);
        // Taylor shift y -> y + shift
        for (int i = 0; i < order_; ++i)
            for (int j = order_ - 2; j >= i; --j) q[static_cast<std::size_t>(j)] += shift * q[static_cast<std::size_t>(j + 1)];
        double* bc = &local_[static_cast<std::size_t>(c) * static_cast<std::size_t>(order_)];
        double pw = 1.0;
        for (int i = 0; i < order_; ++i) {
            bc[i] += q[static_cast<std::size_t>(i)] * pw;
            pw *= ratio;
        }
        downward(c);
    }
}

LineCauchySum::Value LineCauchySum::in_gap(std::size_t k, double x) const {
    const int leaf = leaf_of_[k];
    const Node& T = nodes_[static_cast<std::size_t>(leaf)];
    const double ts = T.tr > 0 ? T.tr : 1.0;
    const double u = (x - T.tc) / ts;
    const double* b = &local_[static_cast<std::size_t>(leaf) * static_cast<std::size_t>(order_)];
    double val = b[order_ - 1], der = 0.0;
    for (int l = order_ - 2; l >= 0; --l) {
        der = der * u + val;
        val = val * u + b[l];
    }
    double r = val, dr = der / ts;
    for (int s : near_[static_cast<std::size_t>(leaf)]) {
        const Node& S = nodes_[static_cast<std::size_t>(s)];
        std::size_t lo = S.lo, hi = S.hi;
        // skip the two points bounding the gap
        const std::size_t e0 = k, e1 = k + 1;
        if (e0 >= lo && e0 < hi) {
            real_sums(pts_.data(), w_.data(), lo, e0, x, r, dr);
            lo = e0 + 1;
        }
        if (e1 >= lo && e1 < hi) {
            real_sums(pts_.data(), w_.data(), lo, e1, x, r, dr);
            lo = e1 + 1;
        }
        real_sums(pts_.data(), w_.data(), lo, hi, x, r, dr);
    }
    return {r, dr};
}

}  // namespace rootflow

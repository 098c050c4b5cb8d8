#pragma once

// Linear hyperbolic toral automorphisms: integer matrices with |det| = 1,
// Lyapunov exponents with multiplicities, the Ruelle inequality, and the
// Pesin formula in the linear / Haar case.
//
// Hyperbolicity is certified exactly, not numerically: the characteristic
// polynomial (Faddeev-LeVerrier over exact rationals) is checked for roots
// at +-1, then for unit-circle root pairs through the gcd with its
// reciprocal and a Sturm count of the x + 1/x transform over [-2, 2].
// Spectrum values are numeric: the direct eigensolver on M, cross-checked
// in pesin_check against roots of the exact characteristic polynomial
// obtained through a companion matrix (two independent pipelines).

#include "scalar.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace ergo {

namespace poly {

using Poly = std::vector<BigRational>; // coefficient of x^i at index i

inline void trim(Poly& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}
inline int degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

inline BigRational eval(const Poly& p, const BigRational& x) {
    BigRational v(0);
    for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
    return v;
}

inline Poly derivative(const Poly& p) {
    Poly d;
    for (std::size_t i = 1; i < p.size(); ++i) d.push_back(BigRational(i) * p[i]);
    return d;
}

inline Poly remainder(Poly a, const Poly& b) {
    trim(a);
    while (degree(a) >= degree(b) && !a.empty()) {
        BigRational f = a.back() / b.back();
        int shift = degree(a) - degree(b);
        for (std::size_t i = 0; i < b.size(); ++i)
            a[i + shift] -= f * b[i];
        trim(a);
    }
    return a;
}

inline Poly gcd(Poly a, Poly b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = remainder(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) { // monic normalization
        BigRational lead = a.back();
        for (auto& c : a) c /= lead;
    }
    return a;
}

// Distinct real roots of p inside (lo, hi), by a Sturm chain; requires
// p(lo) != 0 and p(hi) != 0.
inline int sturm_count(const Poly& p, const BigRational& lo, const BigRational& hi) {
    std::vector<Poly> chain{p, derivative(p)};
    trim(chain[0]);
    trim(chain[1]);
    while (!chain.back().empty() && degree(chain.back()) > 0) {
        Poly r = remainder(chain[chain.size() - 2], chain.back());
        for (auto& c : r) c = -c;
        trim(r);
        if (r.empty()) break;
        chain.push_back(std::move(r));
    }
    auto variations = [&](const BigRational& x) {
        int count = 0, last = 0;
        for (const Poly& q : chain) {
            if (q.empty()) continue;
            BigRational v = eval(q, x);
            int s = v.is_zero() ? 0 : (v < 0 ? -1 : 1);
            if (s != 0) {
                if (last != 0 && s != last) ++count;
                last = s;
            }
        }
        return count;
    };
    return variations(lo) - variations(hi);
}

} // namespace poly

struct ExponentEntry {
    double chi = 0;       // log-modulus of an eigenvalue
    int multiplicity = 0; // dimension of the grouped eigenspace
};

struct ExponentSpectrum {
    std::vector<ExponentEntry> entries; // sorted increasing

    int dimension() const {
        int d = 0;
        for (const auto& e : entries) d += e.multiplicity;
        return d;
    }
    double positive_sum() const {
        double s = 0;
        for (const auto& e : entries)
            if (e.chi > 0) s += e.multiplicity * e.chi;
        return s;
    }
    double total() const {
        double s = 0;
        for (const auto& e : entries) s += e.multiplicity * e.chi;
        return s;
    }
};

class ToralSystem {
public:
    explicit ToralSystem(std::vector<std::vector<long long>> entries) : m_(std::move(entries)) {
        const int d = static_cast<int>(m_.size());
        if (d == 0) throw error("toral_automorphism: empty matrix");
        for (const auto& row : m_)
            if (static_cast<int>(row.size()) != d)
                throw error("toral_automorphism: matrix is not square");
        if (d > 8) throw error("toral_automorphism: dimension beyond desk scale");

        compute_char_poly();
        // det M = (-1)^d c_0
        BigInt det = char_poly_[0];
        if (d % 2 == 1) det = -det;
        det_ = det;
        if (det != 1 && det != -1)
            throw error("toral_automorphism: |det| = " + BigInt(abs(det)).str() + ", expected 1");
        certify_hyperbolic();

        Eigen::MatrixXd M(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) M(i, j) = static_cast<double>(m_[i][j]);
        Eigen::EigenSolver<Eigen::MatrixXd> solver(M);
        for (int i = 0; i < d; ++i) eigenvalues_.push_back(solver.eigenvalues()[i]);
    }

    int dim() const { return static_cast<int>(m_.size()); }
    const std::vector<std::vector<long long>>& matrix() const { return m_; }
    const BigInt& determinant() const { return det_; }
    // monic, index i = coefficient of lambda^i, top coefficient 1 implicit? no: stored fully
    const std::vector<BigInt>& char_poly() const { return char_poly_; }
    const std::vector<std::complex<double>>& eigenvalues() const { return eigenvalues_; }

    // Roots of the exact characteristic polynomial through its companion
    // matrix; the second, independent numeric pipeline.
    std::vector<std::complex<double>> char_poly_roots() const {
        const int d = dim();
        Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d, d);
        for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
        for (int i = 0; i < d; ++i) C(i, d - 1) = -static_cast<double>(char_poly_[i]);
        Eigen::EigenSolver<Eigen::MatrixXd> solver(C);
        std::vector<std::complex<double>> roots;
        for (int i = 0; i < d; ++i) roots.push_back(solver.eigenvalues()[i]);
        return roots;
    }

private:
    void compute_char_poly() {
        // Faddeev-LeVerrier; divisions are exact for integer input
        const int d = dim();
        std::vector<std::vector<BigRational>> A(d, std::vector<BigRational>(d)),
            Mk(d, std::vector<BigRational>(d, BigRational(0)));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) A[i][j] = BigRational(m_[i][j]);
        std::vector<BigRational> c(d + 1);
        c[d] = 1;
        Mk = A;
        for (int k = 1; k <= d; ++k) {
            if (k > 1) {
                // Mk = A * (Mk + c[d-k+1] I)
                auto shifted = Mk;
                for (int i = 0; i < d; ++i) shifted[i][i] += c[d - k + 1];
                std::vector<std::vector<BigRational>> next(d, std::vector<BigRational>(d, BigRational(0)));
                for (int i = 0; i < d; ++i)
                    for (int l = 0; l < d; ++l)
                        for (int j = 0; j < d; ++j) next[i][j] += A[i][l] * shifted[l][j];
                Mk = std::move(next);
            }
            BigRational tr(0);
            for (int i = 0; i < d; ++i) tr += Mk[i][i];
            c[d - k] = -tr / BigRational(k);
        }
        char_poly_.clear();
        for (int i = 0; i <= d; ++i) {
            if (denominator(c[i]) != 1)
                throw error("toral_automorphism: internal characteristic polynomial error");
            char_poly_.push_back(numerator(c[i]));
        }
    }

    void certify_hyperbolic() const {
        poly::Poly p;
        for (const BigInt& c : char_poly_) p.push_back(BigRational(c));

        BigRational at1 = poly::eval(p, BigRational(1));
        BigRational atm1 = poly::eval(p, BigRational(-1));
        if (at1.is_zero() || atm1.is_zero())
            throw error("toral_automorphism: eigenvalue on the unit circle (root at +-1)");

        poly::Poly rev(p.rbegin(), p.rend());
        poly::Poly g = poly::gcd(p, rev);
        if (poly::degree(g) <= 0) return; // no reciprocal pairs at all
        const int m = poly::degree(g) / 2;
        if (poly::degree(g) % 2 != 0)
            throw error("toral_automorphism: internal reciprocal factor error");

        // g is self-reciprocal (a -g case would put a root at 1); write
        // g(x) / x^m in the basis V_j = x^j + x^-j and convert to a
        // polynomial q(y) with y = x + 1/x via V_{j+1} = y V_j - V_{j-1}
        poly::Poly q(static_cast<std::size_t>(m) + 1, BigRational(0));
        poly::Poly v_prev{BigRational(2)};           // V_0
        poly::Poly v_cur{BigRational(0), BigRational(1)}; // V_1 = y
        q[0] += g[m];
        for (int j = 1; j <= m; ++j) {
            for (std::size_t i = 0; i < v_cur.size(); ++i) q[i] += g[m + j] * v_cur[i];
            // advance V
            poly::Poly v_next(v_cur.size() + 1, BigRational(0));
            for (std::size_t i = 0; i < v_cur.size(); ++i) v_next[i + 1] += v_cur[i];
            for (std::size_t i = 0; i < v_prev.size(); ++i) v_next[i] -= v_prev[i];
            v_prev = std::move(v_cur);
            v_cur = std::move(v_next);
        }
        poly::trim(q);
        // unit-circle pairs are exactly the roots of q in (-2, 2); the
        // endpoints were excluded with p(+-1) above
        if (poly::sturm_count(q, BigRational(-2), BigRational(2)) > 0)
            throw error("toral_automorphism: eigenvalue on the unit circle");
    }

    std::vector<std::vector<long long>> m_;
    BigInt det_ = 0;
    std::vector<BigInt> char_poly_;
    std::vector<std::complex<double>> eigenvalues_;
};

inline ToralSystem toral_automorphism(std::vector<std::vector<long long>> m) {
    return ToralSystem(std::move(m));
}

namespace detail {

inline ExponentSpectrum group_exponents(const std::vector<std::complex<double>>& eigenvalues) {
    std::vector<double> chis;
    for (const auto& ev : eigenvalues) chis.push_back(std::log(std::abs(ev)));
    std::sort(chis.begin(), chis.end());
    ExponentSpectrum spec;
    for (double chi : chis) {
        if (!spec.entries.empty() && std::abs(spec.entries.back().chi - chi) < 1e-9) {
            // iterative mean keeps the grouped value stable
            auto& e = spec.entries.back();
            e.chi = (e.chi * e.multiplicity + chi) / (e.multiplicity + 1);
            e.multiplicity += 1;
        } else {
            spec.entries.push_back({chi, 1});
        }
    }
    return spec;
}

} // namespace detail

// Exponents are the log-moduli of the eigenvalues, grouped with their
// multiplicities; they sum to log|det| = 0.
inline ExponentSpectrum lyapunov_spectrum(const ToralSystem& sys) {
    return detail::group_exponents(sys.eigenvalues());
}

struct PesinResult {
    double h_haar = 0;       // entropy w.r.t. Haar measure (classical identity)
    double positive_sum = 0; // sum of positive exponents with multiplicity
    bool equal = false;      // to 1e-12
};

// Haar entropy against the positive exponent sum. h_haar is evaluated from
// the roots of the exact characteristic polynomial, positive_sum from the
// direct eigensolver, so agreement exercises both pipelines.
inline PesinResult pesin_check(const ToralSystem& sys) {
    PesinResult res;
    for (const auto& root : sys.char_poly_roots()) {
        double mod = std::abs(root);
        if (mod > 1.0) res.h_haar += std::log(mod);
    }
    res.positive_sum = lyapunov_spectrum(sys).positive_sum();
    res.equal = std::abs(res.h_haar - res.positive_sum) <= 1e-12;
    return res;
}

struct RuelleResult {
    bool holds = false;  // h <= sum of positive exponents (+1e-12)
    bool strict = false; // h < sum - 1e-12
    double bound = 0;
};

inline RuelleResult ruelle_check(const ToralSystem& sys, double h_measure) {
    if (h_measure < 0) throw error("ruelle_check: negative entropy");
    RuelleResult res;
    res.bound = lyapunov_spectrum(sys).positive_sum();
    res.holds = h_measure <= res.bound + 1e-12;
    res.strict = h_measure < res.bound - 1e-12;
    return res;
}

} // namespace ergo

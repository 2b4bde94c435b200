// Reference gates with known entanglement properties, and permutation
// 2-unitaries built from mutually orthogonal Latin squares (modular
// construction for prime d, finite-field construction for prime powers;
// no pair exists for d = 2 or 6).

#pragma once

#include "duforge/core.hpp"
#include "duforge/measures.hpp"
#include "duforge/tensor.hpp"

#include <string>
#include <utility>
#include <vector>

namespace duforge {

struct NamedGate {
    std::string name;
    int d = 0;
    BipartiteUnitary gate;
    GateClassification expected_class;
};

namespace detail {

// GF(p^e) for e <= 3, elements labeled 0..p^e-1 by base-p digits
// (little-endian). The reduction polynomial is found by brute force; for
// degree 2 and 3 irreducibility is exactly "no root in F_p".
class GaloisField {
  public:
    GaloisField(int p, int e) : p_(p), e_(e) {
        if (e_ < 1 || e_ > 3) throw parameter_error("GaloisField: degree must be 1..3");
        if (e_ == 1) return;
        const int q = ipow(p_, e_);
        for (int tail = 0; tail < q; ++tail) {
            // candidate f(x) = x^e + Σ tail_digits[k] x^k
            bool has_root = false;
            for (int x = 0; x < p_ && !has_root; ++x) {
                int val = ipow_mod(x, e_);
                int t = tail;
                int xk = 1;
                for (int k = 0; k < e_; ++k) {
                    val = (val + (t % p_) * xk) % p_;
                    t /= p_;
                    xk = (xk * x) % p_;
                }
                has_root = (val == 0);
            }
            if (!has_root) {
                poly_tail_ = tail;
                return;
            }
        }
        throw std::logic_error("GaloisField: no irreducible polynomial found");
    }

    int order() const { return ipow(p_, e_); }

    int add(int a, int b) const {
        int r = 0, base = 1;
        for (int k = 0; k < e_; ++k) {
            r += ((a % p_ + b % p_) % p_) * base;
            a /= p_;
            b /= p_;
            base *= p_;
        }
        return r;
    }

    int mul(int a, int b) const {
        if (e_ == 1) return (a * b) % p_;
        // polynomial product, degree up to 2e-2
        int prod[5] = {0, 0, 0, 0, 0};
        int da[3], db[3];
        for (int k = 0; k < e_; ++k) {
            da[k] = a % p_;
            a /= p_;
            db[k] = b % p_;
            b /= p_;
        }
        for (int i = 0; i < e_; ++i)
            for (int j = 0; j < e_; ++j)
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % p_;
        // reduce with x^e = -tail
        for (int deg = 2 * e_ - 2; deg >= e_; --deg) {
            const int c = prod[deg];
            if (c == 0) continue;
            prod[deg] = 0;
            int t = poly_tail_;
            for (int k = 0; k < e_; ++k) {
                prod[deg - e_ + k] = (prod[deg - e_ + k] + (p_ - t % p_) * c) % p_;
                t /= p_;
            }
        }
        int r = 0, base = 1;
        for (int k = 0; k < e_; ++k) {
            r += prod[k] * base;
            base *= p_;
        }
        return r;
    }

  private:
    static int ipow(int b, int e) {
        int r = 1;
        while (e--) r *= b;
        return r;
    }
    int ipow_mod(int x, int e) const {
        int r = 1;
        while (e--) r = (r * x) % p_;
        return r;
    }

    int p_;
    int e_;
    int poly_tail_ = 0;
};

inline bool factor_prime_power(int d, int& p, int& e) {
    for (int q = 2; q * q <= d; ++q) {
        if (d % q == 0) {
            p = q;
            e = 0;
            int m = d;
            while (m % q == 0) {
                m /= q;
                ++e;
            }
            return m == 1;
        }
    }
    p = d;
    e = 1;
    return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Mutually orthogonal Latin squares

struct LatinSquarePair {
    int d = 0;
    std::vector<std::vector<int>> first;
    std::vector<std::vector<int>> second;
};

inline bool is_latin_square(const std::vector<std::vector<int>>& L) {
    const int d = static_cast<int>(L.size());
    for (int i = 0; i < d; ++i) {
        std::vector<bool> row(d, false), col(d, false);
        for (int j = 0; j < d; ++j) {
            const int a = L[i][j], b = L[j][i];
            if (a < 0 || a >= d || b < 0 || b >= d || row[a] || col[b]) return false;
            row[a] = col[b] = true;
        }
    }
    return true;
}

inline bool are_orthogonal(const std::vector<std::vector<int>>& L1,
                           const std::vector<std::vector<int>>& L2) {
    const int d = static_cast<int>(L1.size());
    std::vector<bool> seen(d * d, false);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const int pair = L1[i][j] * d + L2[i][j];
            if (seen[pair]) return false;
            seen[pair] = true;
        }
    return true;
}

// L_a(i, j) = i + a*j over GF(d) for a = 1, 2. Covers every prime power;
// d = 2 and 6 admit no orthogonal pair, composite non-prime-powers are not
// constructed here.
inline LatinSquarePair mols_pair(int d) {
    if (d < 2) throw dimension_error("mols_pair: d must be >= 2");
    if (d == 2 || d == 6)
        throw existence_error("mols_pair: no orthogonal pair exists for d = " + std::to_string(d));
    int p = 0, e = 0;
    if (!detail::factor_prime_power(d, p, e))
        throw parameter_error("mols_pair: composite non-prime-power d = " + std::to_string(d) +
                              " not supported");
    detail::GaloisField gf(p, e);
    LatinSquarePair pair;
    pair.d = d;
    pair.first.assign(d, std::vector<int>(d));
    pair.second.assign(d, std::vector<int>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            pair.first[i][j] = gf.add(i, gf.mul(1, j));
            pair.second[i][j] = gf.add(i, gf.mul(2, j));
        }
    if (!is_latin_square(pair.first) || !is_latin_square(pair.second) ||
        !are_orthogonal(pair.first, pair.second))
        throw std::logic_error("mols_pair: construction failed validation");
    return pair;
}

// ---------------------------------------------------------------------------
// Named gates

namespace detail {

inline Mat identity_gate(int d) { return Mat::Identity(d * d, d * d); }

inline Mat cnot_gate() {
    Mat U = Mat::Zero(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            U((i * 2) + (j ^ i), i * 2 + j) = 1.0;
    return U;
}

// cnot with control A followed by cnot with control B: |i,j> -> |j, i^j>
inline Mat dcnot_gate() {
    Mat U = Mat::Zero(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            U(j * 2 + (i ^ j), i * 2 + j) = 1.0;
    return U;
}

// order-d² discrete Fourier matrix on the joint space, ω = exp(2πi/d²)
inline Mat fourier_gate(int d) {
    const int n = d * d;
    Mat F(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const double angle = 2.0 * 3.14159265358979323846 * ((j * k) % n) / n;
            F(j, k) = Complex(std::cos(angle), std::sin(angle)) / double(d);
        }
    return F;
}

inline NamedGate make_named(std::string name, int d, Mat m, GateClass expected) {
    NamedGate g{std::move(name), d, BipartiteUnitary(d, std::move(m)), {expected, 1e-10}};
    const GateClassification actual = classify(g.gate, g.expected_class.tolerance);
    if (actual.label != g.expected_class.label)
        throw std::logic_error("named gate " + g.name + " classified as " +
                               to_string(actual.label) + ", expected " +
                               to_string(g.expected_class.label));
    return g;
}

}  // namespace detail

inline std::vector<std::string> named_gate_names() {
    return {"identity", "swap", "cnot", "dcnot", "fourier"};
}

inline NamedGate named_gate(const std::string& name, int d) {
    if (d < 2) throw dimension_error("named_gate: d must be >= 2");
    if (name == "identity") return detail::make_named(name, d, detail::identity_gate(d), GateClass::t_dual);
    if (name == "swap") return detail::make_named(name, d, swap_gate(d).matrix, GateClass::dual);
    if (name == "cnot") {
        if (d != 2) throw parameter_error("named_gate: cnot is defined for d = 2");
        return detail::make_named(name, d, detail::cnot_gate(), GateClass::t_dual);
    }
    if (name == "dcnot") {
        if (d != 2) throw parameter_error("named_gate: dcnot is defined for d = 2");
        return detail::make_named(name, d, detail::dcnot_gate(), GateClass::dual);
    }
    if (name == "fourier") return detail::make_named(name, d, detail::fourier_gate(d), GateClass::dual);
    throw parameter_error("named_gate: unknown gate '" + name + "'");
}

// Permutation 2-unitary |i,j⟩ ↦ |L1(i,j), L2(i,j)⟩ from an orthogonal pair
// of Latin squares. Simultaneously unitary, unitary after realignment and
// unitary after partial transpose (a perfect tensor).
inline NamedGate ols_permutation(int d) {
    LatinSquarePair mols = mols_pair(d);
    Mat U = Mat::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            U(mols.first[i][j] * d + mols.second[i][j], i * d + j) = 1.0;
    return detail::make_named("ols", d, std::move(U), GateClass::two_unitary);
}

}  // namespace duforge

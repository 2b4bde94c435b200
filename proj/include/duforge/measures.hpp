// Scalar invariants of a bipartite unitary: operator Schmidt spectrum,
// operator entanglements E(U) and E(US), Tsallis entropies, trace norm of
// the realignment, entangling power, and the gate classification built on
// top of them.
//
// Throughout, λ_j are the squared singular values of U^R (descending) and
// p_j = λ_j / d². Unitarity of U gives Σ λ_j = d².

#pragma once

#include "duforge/core.hpp"
#include "duforge/rng.hpp"
#include "duforge/sampling.hpp"
#include "duforge/svd.hpp"
#include "duforge/tensor.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <vector>

namespace duforge {

inline double op_entanglement_max(int d) { return 1.0 - 1.0 / (double(d) * d); }
inline double entangling_power_max(int d) { return (d - 1.0) / (d + 1.0); }

// ---------------------------------------------------------------------------
// Schmidt spectrum

struct SchmidtSpectrum {
    int d = 0;
    std::vector<double> values;  // d² values, descending

    double sum() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
};

inline SchmidtSpectrum schmidt_spectrum(const BipartiteUnitary& U) {
    const Eigen::VectorXd sigma = singular_values(realign(U.matrix));
    SchmidtSpectrum s;
    s.d = U.d;
    s.values.resize(sigma.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i) s.values[i] = sigma(i) * sigma(i);
    return s;
}

// ---------------------------------------------------------------------------
// Linear-entropy operator entanglements
//
// E(U) = 1 - tr[(U^R U^R†)²]/d⁴ and E(US) = 1 - tr[(U^T_A U^T_A†)²]/d⁴ are
// evaluated directly from the Gram matrix, which needs no SVD; the spectrum
// route (tsallis_entropy at q = 2) provides an independent cross-check.

namespace detail {
inline double gram_linear_entropy(const Mat& reshuffled, int d) {
    Mat G = reshuffled * reshuffled.adjoint();
    const double d4 = double(d) * d * d * d;
    return 1.0 - G.squaredNorm() / d4;
}
}  // namespace detail

inline double op_entanglement(const BipartiteUnitary& U) {
    return detail::gram_linear_entropy(realign(U.matrix), U.d);
}

inline double op_entanglement_swapped(const BipartiteUnitary& U) {
    return detail::gram_linear_entropy(partial_transpose(U.matrix), U.d);
}

// ---------------------------------------------------------------------------
// Tsallis entropies S_q = (1 - Σ p_j^q)/(q - 1), q > 0, q ≠ 1

inline double tsallis_entropy(const SchmidtSpectrum& spec, double q) {
    if (!(q > 0.0)) throw parameter_error("tsallis_entropy: q must be positive");
    if (q == 1.0) throw parameter_error("tsallis_entropy: q = 1 limit not supported");
    const double d2 = double(spec.d) * spec.d;
    double sum = 0.0;
    for (double lam : spec.values) {
        // tiny negatives / roundoff dust would blow up fractional powers
        if (q < 1.0 && lam < 1e-14) continue;
        sum += std::pow(lam / d2, q);
    }
    return (1.0 - sum) / (q - 1.0);
}

inline double tsallis_entropy(const BipartiteUnitary& U, double q) {
    return tsallis_entropy(schmidt_spectrum(U), q);
}

inline double trace_norm_realigned(const BipartiteUnitary& U) {
    return singular_values(realign(U.matrix)).sum();
}

// ---------------------------------------------------------------------------
// Entangling power

// Closed form e_p(U) = d² [E(U) + E(US) - E(S)] / (d+1)².
inline double entangling_power(const BipartiteUnitary& U) {
    const int d = U.d;
    const double es = op_entanglement_max(d);
    return d * d * (op_entanglement(U) + op_entanglement_swapped(U) - es) /
           ((d + 1.0) * (d + 1.0));
}

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int n_samples = 0;
};

// Monte-Carlo estimate of the same average: mean linear entropy 1 - tr ρ_A²
// of U|ψ_A⟩|ψ_B⟩ over Haar product inputs. Kept as an independent oracle for
// the closed form.
inline MonteCarloEstimate entangling_power_mc(const BipartiteUnitary& U, int n_samples,
                                              StreamRng& rng) {
    if (n_samples < 100) throw precondition_error("entangling_power_mc: need >= 100 samples");
    const int d = U.d;
    double sum = 0.0, sum_sq = 0.0;
    Vec in(d * d), out;
    Mat psi(d, d);
    for (int s = 0; s < n_samples; ++s) {
        auto [a, b] = haar_product_state(d, rng);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                in(i * d + j) = a(i) * b(j);
        out = U.matrix * in;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                psi(i, j) = out(i * d + j);
        Mat rho = psi * psi.adjoint();
        const double e = 1.0 - rho.squaredNorm();
        sum += e;
        sum_sq += e * e;
    }
    MonteCarloEstimate est;
    est.n_samples = n_samples;
    est.mean = sum / n_samples;
    const double var = std::max(0.0, sum_sq / n_samples - est.mean * est.mean);
    est.std_error = std::sqrt(var / n_samples);
    return est;
}

inline MonteCarloEstimate entangling_power_mc(const BipartiteUnitary& U, int n_samples,
                                              RngSeed seed) {
    StreamRng rng(seed);
    return entangling_power_mc(U, n_samples, rng);
}

// ---------------------------------------------------------------------------
// Classification

enum class GateClass { generic, dual, t_dual, two_unitary };

inline std::string to_string(GateClass c) {
    switch (c) {
        case GateClass::generic: return "generic";
        case GateClass::dual: return "dual";
        case GateClass::t_dual: return "T_dual";
        case GateClass::two_unitary: return "two_unitary";
    }
    return "generic";
}

inline GateClass gate_class_from_string(const std::string& s) {
    if (s == "generic") return GateClass::generic;
    if (s == "dual") return GateClass::dual;
    if (s == "T_dual") return GateClass::t_dual;
    if (s == "two_unitary") return GateClass::two_unitary;
    throw parameter_error("unknown gate class: " + s);
}

struct GateClassification {
    GateClass label = GateClass::generic;
    double tolerance = 0.0;
};

inline GateClassification classify_from_measures(int d, double e_u, double e_us, double tol) {
    const double max = op_entanglement_max(d);
    const bool dual = (max - e_u) < tol;
    const bool t_dual = (max - e_us) < tol;
    GateClass label = GateClass::generic;
    if (dual && t_dual)
        label = GateClass::two_unitary;
    else if (dual)
        label = GateClass::dual;
    else if (t_dual)
        label = GateClass::t_dual;
    return {label, tol};
}

inline GateClassification classify(const BipartiteUnitary& U, double tol = 1e-8) {
    if (!(tol > 0.0)) throw parameter_error("classify: tolerance must be positive");
    return classify_from_measures(U.d, op_entanglement(U), op_entanglement_swapped(U), tol);
}

// ---------------------------------------------------------------------------
// Bundle of everything for one operator

struct MeasureRecord {
    double E_U = 0.0;
    double E_US = 0.0;
    double ep = 0.0;
    double trace_norm_R = 0.0;
    std::map<double, double> tsallis;  // exponent q -> S_q
};

inline MeasureRecord measure_all(const BipartiteUnitary& U,
                                 const std::vector<double>& qs = {0.5, 2.0, 3.0}) {
    MeasureRecord r;
    const int d = U.d;
    r.E_U = op_entanglement(U);
    r.E_US = op_entanglement_swapped(U);
    r.ep = d * d * (r.E_U + r.E_US - op_entanglement_max(d)) / ((d + 1.0) * (d + 1.0));
    const SchmidtSpectrum spec = schmidt_spectrum(U);
    double tn = 0.0;
    for (double lam : spec.values) tn += std::sqrt(std::max(0.0, lam));
    r.trace_norm_R = tn;
    for (double q : qs) r.tsallis[q] = tsallis_entropy(spec, q);
    return r;
}

}  // namespace duforge

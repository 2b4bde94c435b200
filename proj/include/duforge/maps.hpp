// The nearest-unitary projection and the nonlinear maps built from it:
//
//   M_R  : U -> nearest_unitary(U^R)
//   M_T  : U -> nearest_unitary(U^T_A)
//   M_TR : U -> nearest_unitary((U^R)^T_A)     (one projection at the end)
//   M_RT : U -> M_T(M_R(U))                    (alternating, two projections)
//
// plus the iteration driver with trajectory recording and the decay-model
// fit for the entropy gap Δ_n.
//
// Provable along M_R (and asserted per step, slack 1e-9): the trace norm
// ‖U_n^R‖₁ is nondecreasing and D_n² = 2d² - 2‖U_n^R‖₁, where D_n is the
// HS distance of the pre-projection matrix to its nearest unitary.

#pragma once

#include "duforge/core.hpp"
#include "duforge/measures.hpp"
#include "duforge/svd.hpp"
#include "duforge/tensor.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace duforge {

// ---------------------------------------------------------------------------
// Nearest unitary (unitary polar factor)

struct PolarResult {
    Mat unitary;
    Eigen::VectorXd sigma;   // singular values of the input, descending
    bool gauge_degenerate = false;  // input had (numerically) zero singular values

    double trace_norm() const { return sigma.sum(); }
};

// With M = PΣQ†, the product PQ† minimizes ‖M - W‖ over unitary W in every
// unitarily invariant norm; ‖M - PQ†‖²_HS = Σ (σ_i - 1)². When some σ_i
// vanish the minimizer is non-unique (the SVD's gauge decides) and the
// result is flagged.
inline PolarResult nearest_unitary_full(const Mat& M) {
    if (M.rows() != M.cols()) throw dimension_error("nearest_unitary: square input required");
    if (!all_finite(M)) throw precondition_error("nearest_unitary: non-finite entries");
    SvdResult svd = svd_decompose(M);
    PolarResult r;
    r.unitary = svd.U * svd.V.adjoint();
    r.sigma = std::move(svd.sigma);
    const double smax = r.sigma.size() ? r.sigma(0) : 0.0;
    r.gauge_degenerate = r.sigma(r.sigma.size() - 1) <= 1e-12 * std::max(1.0, smax);
    return r;
}

inline Mat nearest_unitary(const Mat& M) { return nearest_unitary_full(M).unitary; }

// ---------------------------------------------------------------------------
// Map kinds

enum class MapKind { MR, MT, MTR, MRT_alternating };

inline std::string to_string(MapKind k) {
    switch (k) {
        case MapKind::MR: return "MR";
        case MapKind::MT: return "MT";
        case MapKind::MTR: return "MTR";
        case MapKind::MRT_alternating: return "MRT";
    }
    return "MR";
}

inline MapKind map_kind_from_string(const std::string& s) {
    if (s == "MR" || s == "M_R") return MapKind::MR;
    if (s == "MT" || s == "M_T") return MapKind::MT;
    if (s == "MTR" || s == "M_TR") return MapKind::MTR;
    if (s == "MRT" || s == "M_RT") return MapKind::MRT_alternating;
    throw parameter_error("unknown map kind: " + s + " (expected MR|MT|MTR|MRT)");
}

// The reshuffle each map projects after. For the alternating kind this is
// the second (M_T) half; apply_map handles its first half separately.
inline Mat pre_projection(const Mat& U, MapKind kind) {
    switch (kind) {
        case MapKind::MR: return realign(U);
        case MapKind::MT: return partial_transpose(U);
        case MapKind::MTR: return partial_transpose(realign(U));
        case MapKind::MRT_alternating: return partial_transpose(U);
    }
    return realign(U);
}

struct MapStep {
    BipartiteUnitary next;
    double pre_distance = 0.0;    // ‖pre - nearest unitary‖_HS of the (last) projection
    double pre_trace_norm = 0.0;  // ‖pre‖₁ of the same projection
    bool gauge_degenerate = false;
};

inline MapStep apply_map_full(const BipartiteUnitary& U, MapKind kind) {
    Mat work = U.matrix;
    bool degenerate = false;
    if (kind == MapKind::MRT_alternating) {
        PolarResult first = nearest_unitary_full(realign(work));
        degenerate = first.gauge_degenerate;
        work = std::move(first.unitary);
    }
    Mat pre = pre_projection(work, kind);
    PolarResult polar = nearest_unitary_full(pre);
    const double pre_distance = (pre - polar.unitary).norm();
    const double pre_trace_norm = polar.sigma.sum();
    // BipartiteUnitary's constructor re-validates unitarity
    return MapStep{BipartiteUnitary(U.d, std::move(polar.unitary)), pre_distance,
                   pre_trace_norm, degenerate || polar.gauge_degenerate};
}

inline BipartiteUnitary apply_map(const BipartiteUnitary& U, MapKind kind) {
    return apply_map_full(U, kind).next;
}

// ---------------------------------------------------------------------------
// Iteration driver

enum class StopReason { converged, max_iter, stalled };

inline std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::converged: return "converged";
        case StopReason::max_iter: return "max_iter";
        case StopReason::stalled: return "stalled";
    }
    return "max_iter";
}

// Convergence is judged on the gap the map is designed to close: the E(U)
// gap for M_R, the E(US) gap for M_T, and the e_p gap for the 2-unitary
// seeking kinds. Operator distance between iterates is useless here: dual
// unitaries form a continuum and iterates may drift along it.
inline double convergence_gap(MapKind kind, int d, double e_u, double e_us, double ep) {
    switch (kind) {
        case MapKind::MR: return op_entanglement_max(d) - e_u;
        case MapKind::MT: return op_entanglement_max(d) - e_us;
        case MapKind::MTR:
        case MapKind::MRT_alternating: return entangling_power_max(d) - ep;
    }
    return op_entanglement_max(d) - e_u;
}

struct MeasurePoint {
    double E_U = 0.0;
    double E_US = 0.0;
    double ep = 0.0;
};

struct TraceStep {
    int n = 0;
    double E_U = 0.0;
    double E_US = 0.0;
    double ep = 0.0;
    double trace_norm_R = 0.0;
    double D_n = 0.0;  // distance of the pre-projection matrix to its nearest unitary
    GateClassification cls;
};

struct IterationTrace {
    MapKind kind = MapKind::MR;
    int d = 0;
    std::vector<TraceStep> steps;        // every record_every steps plus the final one
    std::vector<MeasurePoint> series;    // dense, index = iteration number 0..n_final
    BipartiteUnitary final_operator;
    StopReason stop_reason = StopReason::max_iter;
    int n_final = 0;
    int gauge_degenerate_steps = 0;

    // per-step diagnostics, tracked across all steps (not just recorded ones)
    double worst_trace_norm_drop = 0.0;     // most negative Δ‖U_n^R‖₁ (M_R only)
    double worst_distance_identity = 0.0;   // max |D_n² - (2d² - 2‖pre‖₁)|

    double final_gap() const {
        const MeasurePoint& m = series.back();
        return convergence_gap(kind, d, m.E_U, m.E_US, m.ep);
    }
};

struct IterateOptions {
    int max_iter = 100;
    double eps_gap = 1e-8;
    int record_every = 1;
    double class_tol = 1e-8;
    double stall_tol = 1e-12;  // HS distance for the period-2 cycle check, scaled by d
};

inline int default_max_iter(int d) { return d <= 3 ? 100 : 2000; }

namespace detail {

inline MeasurePoint measure_point(const BipartiteUnitary& U) {
    MeasurePoint m;
    m.E_U = op_entanglement(U);
    m.E_US = op_entanglement_swapped(U);
    m.ep = U.d * U.d * (m.E_U + m.E_US - op_entanglement_max(U.d)) /
           ((U.d + 1.0) * (U.d + 1.0));
    return m;
}

}  // namespace detail

// Iterates kind on U0 until the convergence gap drops below eps_gap, the
// iteration budget runs out, or the trajectory is detected to be stuck on a
// period-2 cycle of the map away from convergence (some d = 3 permutation
// seeds end up pinned at non-dual fixed points of M_R²; such trajectories
// are reported as stalled, never assumed converged).
inline IterationTrace iterate(const BipartiteUnitary& U0, MapKind kind,
                              const IterateOptions& opt) {
    if (opt.max_iter < 1) throw precondition_error("iterate: max_iter must be >= 1");
    if (!(opt.eps_gap > 0.0)) throw precondition_error("iterate: eps_gap must be positive");
    if (opt.record_every < 1) throw precondition_error("iterate: record_every must be >= 1");

    IterationTrace trace{kind, U0.d, {}, {}, U0, StopReason::max_iter, 0, 0, 0.0, 0.0};
    const int d = U0.d;
    const double two_d2 = 2.0 * d * d;

    BipartiteUnitary current = U0;
    Mat prev1 = U0.matrix;  // U_{n-1} and U_{n-2} for the cycle check
    Mat prev2;

    MeasurePoint m = detail::measure_point(current);
    trace.series.push_back(m);

    // record row for the current operator; D_n and the pre-projection trace
    // norm come from a fresh reshuffle + SVD of the *current* operator
    const auto record_row = [&](int n, const MeasurePoint& mp, double d_n, double pre_tn) {
        TraceStep row;
        row.n = n;
        row.E_U = mp.E_U;
        row.E_US = mp.E_US;
        row.ep = mp.ep;
        row.D_n = d_n;
        row.trace_norm_R = pre_tn;
        row.cls = classify_from_measures(d, mp.E_U, mp.E_US, opt.class_tol);
        trace.steps.push_back(row);
    };

    // ‖U^R‖₁ for the recorded column; reuses nothing, only taken at rows
    const auto realign_trace_norm = [&](const Mat& U) {
        return singular_values(realign(U)).sum();
    };

    double last_mr_trace_norm = -1.0;
    int n = 0;
    std::optional<StopReason> stop;

    if (convergence_gap(kind, d, m.E_U, m.E_US, m.ep) < opt.eps_gap)
        stop = StopReason::converged;

    while (!stop) {
        MapStep step = apply_map_full(current, kind);
        if (step.gauge_degenerate) ++trace.gauge_degenerate_steps;

        // D_n² = 2d² - 2‖pre‖₁ holds identically because the pre-projection
        // matrix is an entry permutation of a unitary; track the residual.
        const double ident = std::abs(step.pre_distance * step.pre_distance -
                                      (two_d2 - 2.0 * step.pre_trace_norm));
        trace.worst_distance_identity = std::max(trace.worst_distance_identity, ident);

        if (kind == MapKind::MR) {
            if (last_mr_trace_norm >= 0.0) {
                const double drop = step.pre_trace_norm - last_mr_trace_norm;
                trace.worst_trace_norm_drop = std::min(trace.worst_trace_norm_drop, drop);
            }
            last_mr_trace_norm = step.pre_trace_norm;
        }

        if (n % opt.record_every == 0) {
            const double tn = kind == MapKind::MR ? step.pre_trace_norm
                                                  : realign_trace_norm(current.matrix);
            record_row(n, m, step.pre_distance, tn);
        }

        current = step.next;
        ++n;
        m = detail::measure_point(current);
        trace.series.push_back(m);

        if (convergence_gap(kind, d, m.E_U, m.E_US, m.ep) < opt.eps_gap) {
            stop = StopReason::converged;
        } else if (n >= opt.max_iter) {
            stop = StopReason::max_iter;
        } else {
            // period-2 cycle: the map is deterministic, so U_n ≈ U_{n-2}
            // (up to global phase) pins the trajectory forever
            if (prev2.size() > 0 &&
                phase_aligned_distance(current.matrix, prev2) < opt.stall_tol * d)
                stop = StopReason::stalled;
            prev2 = std::move(prev1);
            prev1 = current.matrix;
        }
    }

    // final row (skip if the last recorded row already is this step)
    if (trace.steps.empty() || trace.steps.back().n != n) {
        MapStep probe = apply_map_full(current, kind);
        const double tn = kind == MapKind::MR ? probe.pre_trace_norm
                                              : realign_trace_norm(current.matrix);
        record_row(n, m, probe.pre_distance, tn);
    }

    trace.final_operator = std::move(current);
    trace.stop_reason = *stop;
    trace.n_final = n;
    return trace;
}

// ---------------------------------------------------------------------------
// Decay-model fit for the gap series Δ_n

enum class DecayModel { exponential, power_law };

inline std::string to_string(DecayModel m) {
    return m == DecayModel::exponential ? "exponential" : "power_law";
}

struct DecayFit {
    DecayModel model = DecayModel::exponential;
    double rate_or_exponent = 0.0;  // α in e^{-αn} or n^{-α}
    double goodness = 0.0;          // R² of the winning fit on log Δ
    int points_used = 0;
};

// Least-squares fit of log Δ_n against n (exponential) and against log n
// (power law); the smaller residual sum wins. Points with Δ below 1e-14 and
// everything after the first such point are dropped (machine-noise floor);
// n = 0 is excluded so both models see the same abscissas.
inline DecayFit fit_decay_series(const std::vector<std::pair<int, double>>& gap_series) {
    if (gap_series.size() < 20)
        throw precondition_error("fit_decay: need at least 20 recorded steps");
    std::vector<double> xs, ys;  // n, log gap
    for (const auto& [n, gap] : gap_series) {
        if (n < 1) continue;
        if (!(gap > 1e-14)) break;
        xs.push_back(static_cast<double>(n));
        ys.push_back(std::log(gap));
    }
    if (xs.size() < 10)
        throw insufficient_data_error("fit_decay: fewer than 10 usable points above 1e-14");

    const auto linear_fit = [](const std::vector<double>& x, const std::vector<double>& y) {
        const double n = static_cast<double>(x.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        for (size_t i = 0; i < x.size(); ++i) {
            sx += x[i];
            sy += y[i];
            sxx += x[i] * x[i];
            sxy += x[i] * y[i];
            syy += y[i] * y[i];
        }
        const double denom = n * sxx - sx * sx;
        const double slope = (n * sxy - sx * sy) / denom;
        const double intercept = (sy - slope * sx) / n;
        double rss = 0;
        for (size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - (intercept + slope * x[i]);
            rss += r * r;
        }
        const double tss = syy - sy * sy / n;
        return std::tuple<double, double, double>(slope, rss, tss);
    };

    std::vector<double> log_xs(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) log_xs[i] = std::log(xs[i]);

    const auto [slope_exp, rss_exp, tss] = linear_fit(xs, ys);
    const auto [slope_pow, rss_pow, tss2] = linear_fit(log_xs, ys);

    DecayFit fit;
    fit.points_used = static_cast<int>(xs.size());
    if (rss_exp <= rss_pow) {
        fit.model = DecayModel::exponential;
        fit.rate_or_exponent = -slope_exp;
        fit.goodness = tss > 0 ? 1.0 - rss_exp / tss : 1.0;
    } else {
        fit.model = DecayModel::power_law;
        fit.rate_or_exponent = -slope_pow;
        fit.goodness = tss2 > 0 ? 1.0 - rss_pow / tss2 : 1.0;
    }
    return fit;
}

// Gap series of an IterationTrace restricted to n ∈ [n_min, n_max]; the gap
// is the one the trace's map kind converges on.
inline std::vector<std::pair<int, double>> gap_series(const IterationTrace& trace, int n_min = 0,
                                                       int n_max = -1) {
    std::vector<std::pair<int, double>> out;
    const int hi = n_max < 0 ? static_cast<int>(trace.series.size()) - 1 : n_max;
    for (int n = n_min; n <= hi && n < static_cast<int>(trace.series.size()); ++n) {
        const MeasurePoint& m = trace.series[n];
        out.emplace_back(n, convergence_gap(trace.kind, trace.d, m.E_U, m.E_US, m.ep));
    }
    return out;
}

inline DecayFit fit_decay(const IterationTrace& trace, int n_min = 0, int n_max = -1) {
    return fit_decay_series(gap_series(trace, n_min, n_max));
}

}  // namespace duforge

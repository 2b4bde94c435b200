// Batch orchestration over many CUE seeds: dual-CUE and M_TR ensembles,
// histograms at iteration checkpoints, classification fractions and decay
// statistics.
//
// Trajectory k draws its seed operator from stream (base_seed.stream + k),
// so reports are bit-identical for any worker count: work is farmed out by
// seed index and folded back in index order.

#pragma once

#include "duforge/core.hpp"
#include "duforge/maps.hpp"
#include "duforge/measures.hpp"
#include "duforge/rng.hpp"
#include "duforge/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace duforge {

struct EnsembleConfig {
    int d = 2;
    int n_seeds = 100;
    MapKind map = MapKind::MR;
    int n_iter = 100;
    int record_every = 10;
    double class_tol = 1e-8;
    int histogram_bins = 40;
    RngSeed base_seed{};

    // eps for the per-trajectory convergence stop; kept two decades below
    // class_tol so early stopping can never affect classification counts
    double eps_gap = 0.0;  // 0 -> class_tol / 100
    std::vector<int> checkpoints;  // empty -> default set scaled with d
    bool override_dim_guard = false;
    int n_workers = 0;  // 0 -> DUFORGE_THREADS or hardware concurrency
    bool keep_two_unitary_operators = true;

    double effective_eps() const { return eps_gap > 0.0 ? eps_gap : class_tol / 100.0; }

    void validate() const {
        if (d < 2) throw dimension_error("ensemble: d must be >= 2");
        if (d > 7 && !override_dim_guard)
            throw parameter_error("ensemble: d > 7 needs the dimension-guard override");
        if (n_seeds < 1 || n_iter < 1 || record_every < 1 || histogram_bins < 2)
            throw parameter_error("ensemble: counts must be positive (and bins >= 2)");
        if (!(class_tol > 0.0)) throw parameter_error("ensemble: class_tol must be positive");
    }

    std::vector<int> effective_checkpoints() const {
        std::vector<int> cps = checkpoints;
        if (cps.empty()) {
            const int scale = 1 << std::max(0, d - 2);  // 5,10,20 at d=2, doubled per dim
            cps = {0, 5 * scale, 10 * scale, 20 * scale};
        }
        cps.push_back(n_iter);
        std::sort(cps.begin(), cps.end());
        cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
        std::erase_if(cps, [&](int n) { return n < 0 || n > n_iter; });
        return cps;
    }
};

struct PerSeedResult {
    int seed_index = 0;
    MeasureRecord final_measures;
    GateClassification cls;
    StopReason stop_reason = StopReason::max_iter;
    int n_iterations = 0;
};

struct HistogramDensity {
    std::vector<double> edges;    // bins + 1
    std::vector<double> density;  // integrates to 1

    double mass() const {
        double m = 0.0;
        for (size_t b = 0; b < density.size(); ++b) m += density[b] * (edges[b + 1] - edges[b]);
        return m;
    }
    int mode_bin() const {
        return static_cast<int>(std::max_element(density.begin(), density.end()) -
                                density.begin());
    }
};

// Normalized density over [lo, hi]; values outside are clamped into the
// edge bins (only fp dust can land there for our bounded measures).
inline HistogramDensity histogram(const std::vector<double>& values, int bins, double lo,
                                  double hi) {
    if (values.empty()) throw parameter_error("histogram: empty input");
    if (bins < 2) throw parameter_error("histogram: need at least 2 bins");
    if (!(hi > lo)) throw parameter_error("histogram: empty range");
    HistogramDensity h;
    h.edges.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) h.edges[b] = lo + (hi - lo) * b / bins;
    std::vector<int> counts(bins, 0);
    for (double v : values) {
        int b = static_cast<int>((v - lo) / (hi - lo) * bins);
        b = std::clamp(b, 0, bins - 1);
        ++counts[b];
    }
    const double width = (hi - lo) / bins;
    h.density.resize(bins);
    for (int b = 0; b < bins; ++b)
        h.density[b] = static_cast<double>(counts[b]) / (static_cast<double>(values.size()) * width);
    return h;
}

struct CheckpointHistograms {
    int n = 0;
    HistogramDensity E_U;
    HistogramDensity ep;
    double frac_gap_below_1e3 = 0.0;  // fraction of seeds with E(U) gap < 1e-3
};

struct DecaySummary {
    int n_exponential = 0;
    int n_power_law = 0;
    int n_insufficient = 0;
    double mean_rate_exponential = 0.0;
    double mean_exponent_power = 0.0;
};

struct EnsembleReport {
    EnsembleConfig config;
    std::vector<PerSeedResult> per_seed;
    std::vector<CheckpointHistograms> histograms;
    std::map<std::string, double> fractions;  // class label -> fraction, sums to 1
    DecaySummary decay;
    double wall_time_seconds = 0.0;
    std::vector<std::pair<int, Mat>> two_unitary_operators;  // (seed index, final matrix)

    double fraction(GateClass c) const {
        const auto it = fractions.find(to_string(c));
        return it == fractions.end() ? 0.0 : it->second;
    }
};

inline int worker_count(int requested, int n_jobs) {
    int n = requested;
    if (n <= 0) {
        if (const char* env = std::getenv("DUFORGE_THREADS")) n = std::atoi(env);
        if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
        if (n <= 0) n = 1;
    }
    return std::max(1, std::min(n, n_jobs));
}

inline EnsembleReport run_ensemble(const EnsembleConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<int> cps = cfg.effective_checkpoints();

    struct SeedOutcome {
        PerSeedResult result;
        std::vector<MeasurePoint> checkpoint_measures;
        std::optional<DecayFit> fit;
        bool fit_insufficient = false;
        Mat two_unitary_operator;  // empty unless classified two_unitary
        double worst_trace_norm_drop = 0.0;
    };
    std::vector<SeedOutcome> outcomes(cfg.n_seeds);

    IterateOptions iopt;
    iopt.max_iter = cfg.n_iter;
    iopt.eps_gap = cfg.effective_eps();
    iopt.record_every = cfg.record_every;
    iopt.class_tol = cfg.class_tol;

    const auto run_seed = [&](int k) {
        StreamRng rng(cfg.base_seed.with_stream(cfg.base_seed.stream + k));
        BipartiteUnitary u0(cfg.d, cue_sample(cfg.d * cfg.d, rng));
        IterationTrace trace = iterate(u0, cfg.map, iopt);

        SeedOutcome& out = outcomes[k];
        out.result.seed_index = k;
        out.result.final_measures = measure_all(trace.final_operator);
        out.result.cls = classify_from_measures(cfg.d, out.result.final_measures.E_U,
                                                out.result.final_measures.E_US, cfg.class_tol);
        out.result.stop_reason = trace.stop_reason;
        out.result.n_iterations = trace.n_final;
        out.worst_trace_norm_drop = trace.worst_trace_norm_drop;

        out.checkpoint_measures.reserve(cps.size());
        for (int n : cps) {
            const int idx = std::min<int>(n, static_cast<int>(trace.series.size()) - 1);
            out.checkpoint_measures.push_back(trace.series[idx]);
        }
        if (static_cast<int>(trace.series.size()) >= 21) {
            try {
                out.fit = fit_decay(trace);
            } catch (const insufficient_data_error&) {
                out.fit_insufficient = true;
            }
        } else {
            out.fit_insufficient = true;
        }
        if (cfg.keep_two_unitary_operators && out.result.cls.label == GateClass::two_unitary)
            out.two_unitary_operator = trace.final_operator.matrix;
    };

    const int workers = worker_count(cfg.n_workers, cfg.n_seeds);
    if (workers == 1) {
        for (int k = 0; k < cfg.n_seeds; ++k) run_seed(k);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int k = next.fetch_add(1); k < cfg.n_seeds; k = next.fetch_add(1))
                    run_seed(k);
            });
        for (auto& t : pool) t.join();
    }

    EnsembleReport report;
    report.config = cfg;
    report.per_seed.reserve(cfg.n_seeds);

    // deterministic fold in seed order
    std::map<std::string, int> class_counts = {{"generic", 0}, {"dual", 0}, {"T_dual", 0},
                                               {"two_unitary", 0}};
    for (int k = 0; k < cfg.n_seeds; ++k) {
        SeedOutcome& out = outcomes[k];
        if (cfg.map == MapKind::MR && out.worst_trace_norm_drop < -1e-9)
            throw std::logic_error(
                "ensemble: trace-norm monotonicity violated along an M_R trajectory (drop " +
                std::to_string(out.worst_trace_norm_drop) + " at seed " + std::to_string(k) + ")");
        report.per_seed.push_back(out.result);
        ++class_counts[to_string(out.result.cls.label)];
        if (out.two_unitary_operator.size() > 0)
            report.two_unitary_operators.emplace_back(k, std::move(out.two_unitary_operator));
        if (out.fit) {
            if (out.fit->model == DecayModel::exponential) {
                ++report.decay.n_exponential;
                report.decay.mean_rate_exponential += out.fit->rate_or_exponent;
            } else {
                ++report.decay.n_power_law;
                report.decay.mean_exponent_power += out.fit->rate_or_exponent;
            }
        } else if (out.fit_insufficient) {
            ++report.decay.n_insufficient;
        }
    }
    if (report.decay.n_exponential > 0) report.decay.mean_rate_exponential /= report.decay.n_exponential;
    if (report.decay.n_power_law > 0) report.decay.mean_exponent_power /= report.decay.n_power_law;
    for (const auto& [label, count] : class_counts)
        report.fractions[label] = static_cast<double>(count) / cfg.n_seeds;

    const double e_max = op_entanglement_max(cfg.d);
    const double ep_max = entangling_power_max(cfg.d);
    for (size_t ci = 0; ci < cps.size(); ++ci) {
        std::vector<double> e_values, ep_values;
        e_values.reserve(cfg.n_seeds);
        ep_values.reserve(cfg.n_seeds);
        int concentrated = 0;
        for (const SeedOutcome& out : outcomes) {
            const MeasurePoint& mp = out.checkpoint_measures[ci];
            e_values.push_back(mp.E_U);
            ep_values.push_back(mp.ep);
            if (e_max - mp.E_U < 1e-3) ++concentrated;
        }
        CheckpointHistograms ch;
        ch.n = cps[ci];
        ch.E_U = histogram(e_values, cfg.histogram_bins, 0.0, e_max);
        ch.ep = histogram(ep_values, cfg.histogram_bins, 0.0, ep_max);
        ch.frac_gap_below_1e3 = static_cast<double>(concentrated) / cfg.n_seeds;
        report.histograms.push_back(std::move(ch));
    }

    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

// ---------------------------------------------------------------------------
// d = 5 asymptote diagnostic: median e_p / e_p^max after n_iter M_TR steps

struct AsymptoteResult {
    double median_ratio = 0.0;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    int n_two_unitary = 0;  // at tolerance 1e-8
};

inline AsymptoteResult d5_asymptote_check(int n_seeds, int n_iter, RngSeed base,
                                          const BipartiteUnitary* seed_override = nullptr,
                                          int n_workers = 0) {
    if (n_seeds < 1 || n_iter < 1) throw parameter_error("d5_asymptote_check: counts must be positive");
    const int d = seed_override ? seed_override->d : 5;
    const double ep_max = entangling_power_max(d);

    IterateOptions iopt;
    iopt.max_iter = n_iter;
    iopt.eps_gap = 1e-12;
    iopt.record_every = std::max(1, n_iter);

    std::vector<double> ratios(n_seeds);
    std::vector<int> twou(n_seeds, 0);
    const auto run_seed = [&](int k) {
        BipartiteUnitary u0 = seed_override
                                  ? *seed_override
                                  : BipartiteUnitary(d, cue_sample(d * d, base.with_stream(base.stream + k)));
        IterationTrace trace = iterate(u0, MapKind::MTR, iopt);
        const MeasurePoint& m = trace.series.back();
        ratios[k] = m.ep / ep_max;
        twou[k] = classify_from_measures(d, m.E_U, m.E_US, 1e-8).label == GateClass::two_unitary;
    };

    const int workers = worker_count(n_workers, n_seeds);
    if (workers == 1) {
        for (int k = 0; k < n_seeds; ++k) run_seed(k);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int k = next.fetch_add(1); k < n_seeds; k = next.fetch_add(1)) run_seed(k);
            });
        for (auto& t : pool) t.join();
    }

    AsymptoteResult res;
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    res.median_ratio = sorted.size() % 2 == 1
                           ? sorted[sorted.size() / 2]
                           : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
    res.min_ratio = sorted.front();
    res.max_ratio = sorted.back();
    for (int f : twou) res.n_two_unitary += f;
    return res;
}

}  // namespace duforge

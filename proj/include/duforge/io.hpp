// Persistence: the duforge matrix file format, CSV trace/histogram export,
// JSON serialization of measure records and ensemble reports, and the flat
// key=value config files for ensemble runs.
//
// Matrix files are text. Header lines are "key value"; the payload is one
// matrix row per line, entries as "re im" pairs printed with 17 significant
// digits, which round-trips IEEE doubles exactly.

#pragma once

#include "duforge/cartan.hpp"
#include "duforge/core.hpp"
#include "duforge/ensemble.hpp"
#include "duforge/maps.hpp"
#include "duforge/measures.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace duforge {

inline constexpr const char* kMatrixFormatTag = "duforge-matrix";
inline constexpr int kMatrixFormatVersion = 1;

struct MatrixFile {
    int version = kMatrixFormatVersion;
    std::string kind = "unitary";
    int d = 0;
    Mat matrix;
};

namespace detail {
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace detail

inline void write_matrix_file(const std::string& path, const Mat& M, int d,
                              const std::string& kind = "unitary") {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path);
    out << kMatrixFormatTag << " v" << kMatrixFormatVersion << "\n";
    out << "kind " << kind << "\n";
    out << "d " << d << "\n";
    out << "rows " << M.rows() << "\n";
    out << "cols " << M.cols() << "\n";
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (j) out << ' ';
            out << detail::format_double(M(i, j).real()) << ' '
                << detail::format_double(M(i, j).imag());
        }
        out << '\n';
    }
    if (!out) throw io_error("write failed for " + path);
}

inline MatrixFile read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot read " + path);
    MatrixFile mf;
    std::string line;
    if (!std::getline(in, line)) throw io_error(path + ": empty file");
    {
        std::istringstream h(line);
        std::string tag, ver;
        h >> tag >> ver;
        if (tag != kMatrixFormatTag || ver.size() < 2 || ver[0] != 'v')
            throw io_error(path + ": not a " + std::string(kMatrixFormatTag) + " file");
        mf.version = std::atoi(ver.c_str() + 1);
        if (mf.version != kMatrixFormatVersion)
            throw io_error(path + ": unsupported format version " + ver);
    }
    int rows = -1, cols = -1;
    for (int k = 0; k < 4; ++k) {
        if (!std::getline(in, line)) throw io_error(path + ": truncated header");
        std::istringstream h(line);
        std::string key;
        h >> key;
        if (key == "kind")
            h >> mf.kind;
        else if (key == "d")
            h >> mf.d;
        else if (key == "rows")
            h >> rows;
        else if (key == "cols")
            h >> cols;
        else
            throw io_error(path + ": unexpected header line '" + line + "'");
        if (!h) throw io_error(path + ": malformed header line '" + line + "'");
    }
    if (mf.d < 2 || rows < 1 || cols < 1) throw io_error(path + ": invalid header values");
    mf.matrix.resize(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) throw io_error(path + ": truncated payload");
        std::istringstream row(line);
        for (int j = 0; j < cols; ++j) {
            double re, im;
            if (!(row >> re >> im)) throw io_error(path + ": malformed payload at row " +
                                                   std::to_string(i));
            mf.matrix(i, j) = Complex(re, im);
        }
        double extra;
        if (row >> extra) throw io_error(path + ": excess entries at row " + std::to_string(i));
    }
    return mf;
}

inline BipartiteUnitary read_bipartite_unitary(const std::string& path) {
    MatrixFile mf = read_matrix_file(path);
    return BipartiteUnitary(mf.d, std::move(mf.matrix));
}

// ---------------------------------------------------------------------------
// CSV export

inline void write_trace_csv(const std::string& path, const IterationTrace& trace) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path);
    out << "n,E_U,E_US,ep,trace_norm,D_n,class\n";
    for (const TraceStep& s : trace.steps)
        out << s.n << ',' << detail::format_double(s.E_U) << ',' << detail::format_double(s.E_US)
            << ',' << detail::format_double(s.ep) << ',' << detail::format_double(s.trace_norm_R)
            << ',' << detail::format_double(s.D_n) << ',' << to_string(s.cls.label) << '\n';
}

inline void write_chamber_csv(const std::string& path, const std::vector<CartanCoords>& coords) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path);
    out << "n,c1,c2,c3\n";
    for (size_t n = 0; n < coords.size(); ++n)
        out << n << ',' << detail::format_double(coords[n].c1) << ','
            << detail::format_double(coords[n].c2) << ',' << detail::format_double(coords[n].c3)
            << '\n';
}

inline void write_histogram_csv(const std::string& path, const HistogramDensity& h) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot write " + path);
    out << "bin_lo,bin_hi,density\n";
    for (size_t b = 0; b < h.density.size(); ++b)
        out << detail::format_double(h.edges[b]) << ',' << detail::format_double(h.edges[b + 1])
            << ',' << detail::format_double(h.density[b]) << '\n';
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const IterationTrace& trace) {
    nlohmann::json steps = nlohmann::json::array();
    for (const TraceStep& s : trace.steps)
        steps.push_back({{"n", s.n},
                         {"E_U", s.E_U},
                         {"E_US", s.E_US},
                         {"ep", s.ep},
                         {"trace_norm", s.trace_norm_R},
                         {"D_n", s.D_n},
                         {"class", to_string(s.cls.label)}});
    return {{"map", to_string(trace.kind)},
            {"d", trace.d},
            {"stop_reason", to_string(trace.stop_reason)},
            {"n_iterations", trace.n_final},
            {"gauge_degenerate_steps", trace.gauge_degenerate_steps},
            {"steps", steps}};
}

inline nlohmann::json to_json(const MeasureRecord& r) {
    nlohmann::json tsallis = nlohmann::json::object();
    for (const auto& [q, s] : r.tsallis) tsallis[detail::format_double(q)] = s;
    return {{"E_U", r.E_U},
            {"E_US", r.E_US},
            {"ep", r.ep},
            {"trace_norm_R", r.trace_norm_R},
            {"tsallis", tsallis}};
}

inline nlohmann::json to_json(const EnsembleConfig& cfg) {
    return {{"d", cfg.d},
            {"n_seeds", cfg.n_seeds},
            {"map", to_string(cfg.map)},
            {"n_iter", cfg.n_iter},
            {"record_every", cfg.record_every},
            {"class_tol", cfg.class_tol},
            {"histogram_bins", cfg.histogram_bins},
            {"seed", cfg.base_seed.seed},
            {"stream", cfg.base_seed.stream},
            {"eps_gap", cfg.effective_eps()},
            {"checkpoints", cfg.effective_checkpoints()}};
}

inline nlohmann::json to_json(const HistogramDensity& h) {
    return {{"edges", h.edges}, {"density", h.density}};
}

inline nlohmann::json to_json(const EnsembleReport& rep) {
    nlohmann::json per_seed = nlohmann::json::array();
    for (const PerSeedResult& r : rep.per_seed)
        per_seed.push_back({{"seed", r.seed_index},
                            {"class", to_string(r.cls.label)},
                            {"stop_reason", to_string(r.stop_reason)},
                            {"n_iterations", r.n_iterations},
                            {"measures", to_json(r.final_measures)}});
    nlohmann::json histograms = nlohmann::json::array();
    for (const CheckpointHistograms& ch : rep.histograms)
        histograms.push_back({{"n", ch.n},
                              {"E_U", to_json(ch.E_U)},
                              {"ep", to_json(ch.ep)},
                              {"frac_gap_below_1e3", ch.frac_gap_below_1e3}});
    nlohmann::json twou = nlohmann::json::array();
    for (const auto& [seed, mat] : rep.two_unitary_operators) twou.push_back(seed);
    return {{"config", to_json(rep.config)},
            {"fractions", rep.fractions},
            {"per_seed", per_seed},
            {"histograms", histograms},
            {"decay",
             {{"n_exponential", rep.decay.n_exponential},
              {"n_power_law", rep.decay.n_power_law},
              {"n_insufficient", rep.decay.n_insufficient},
              {"mean_rate_exponential", rep.decay.mean_rate_exponential},
              {"mean_exponent_power", rep.decay.mean_exponent_power}}},
            {"two_unitary_seeds", twou},
            {"wall_time_seconds", rep.wall_time_seconds}};
}

// ---------------------------------------------------------------------------
// Flat key=value config files for ensemble runs ('#' starts a comment)

inline std::map<std::string, std::string> parse_config_text(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw io_error("config line " + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw io_error("config line " + std::to_string(lineno) + ": empty key or value");
        kv[key] = value;
    }
    return kv;
}

inline void apply_config_entry(EnsembleConfig& cfg, const std::string& key,
                               const std::string& value) {
    const auto as_int = [&] { return std::stoi(value); };
    const auto as_double = [&] { return std::stod(value); };
    if (key == "d")
        cfg.d = as_int();
    else if (key == "n_seeds")
        cfg.n_seeds = as_int();
    else if (key == "map")
        cfg.map = map_kind_from_string(value);
    else if (key == "n_iter")
        cfg.n_iter = as_int();
    else if (key == "record_every")
        cfg.record_every = as_int();
    else if (key == "class_tol")
        cfg.class_tol = as_double();
    else if (key == "histogram_bins")
        cfg.histogram_bins = as_int();
    else if (key == "seed")
        cfg.base_seed.seed = std::stoull(value);
    else if (key == "stream")
        cfg.base_seed.stream = std::stoull(value);
    else if (key == "eps_gap")
        cfg.eps_gap = as_double();
    else if (key == "override_dim_guard")
        cfg.override_dim_guard = (value == "1" || value == "true");
    else if (key == "checkpoints") {
        cfg.checkpoints.clear();
        std::istringstream list(value);
        std::string item;
        while (std::getline(list, item, ',')) cfg.checkpoints.push_back(std::stoi(item));
    } else
        throw io_error("unknown config key '" + key + "'");
}

inline EnsembleConfig load_ensemble_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot read " + path);
    EnsembleConfig cfg;
    for (const auto& [key, value] : parse_config_text(in)) apply_config_entry(cfg, key, value);
    return cfg;
}

}  // namespace duforge

// duforge command-line interface.
//
// Subcommands: sample, iterate, measure, ensemble, cartan, gates, ame.
// Every command is deterministic given its flags and seed. On failure one
// machine-readable line "error: <category>: <detail>" goes to stderr and
// the exit code is nonzero. DUFORGE_THREADS caps ensemble worker count.

#include "duforge/duforge.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace duforge;

void check_dim_guard(int d, bool override_guard) {
    if (d > 7 && !override_guard)
        throw parameter_error("d > 7 is resource-guarded; pass --override-dim-guard to proceed");
}

std::string padded_index(int k, int width) {
    std::string s = std::to_string(k);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

std::string fmtd(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int cmd_sample(int d, int count, std::uint64_t seed, std::uint64_t stream,
               const std::string& out_prefix, bool override_guard) {
    if (d < 2) throw dimension_error("sample: d must be >= 2");
    if (count < 1) throw parameter_error("sample: count must be >= 1");
    check_dim_guard(d, override_guard);
    const int width = std::max(3, static_cast<int>(std::to_string(count - 1).size()));
    for (int k = 0; k < count; ++k) {
        const Mat U = cue_sample(d * d, RngSeed{seed, stream + static_cast<std::uint64_t>(k)});
        write_matrix_file(out_prefix + padded_index(k, width) + ".mat", U, d, "cue");
    }
    std::cout << "wrote " << count << " CUE matrix file(s) with prefix " << out_prefix << "\n";
    return 0;
}

int cmd_iterate(const std::string& in, const std::string& map_name, int n, double eps,
                double class_tol, int record_every, const std::string& trace_out,
                const std::string& trace_json, const std::string& final_out) {
    const BipartiteUnitary u0 = read_bipartite_unitary(in);
    const MapKind kind = map_kind_from_string(map_name);
    IterateOptions opt;
    opt.max_iter = n > 0 ? n : default_max_iter(u0.d);
    opt.eps_gap = eps;
    opt.class_tol = class_tol;
    opt.record_every = record_every;
    const IterationTrace trace = iterate(u0, kind, opt);
    if (!trace_out.empty()) write_trace_csv(trace_out, trace);
    if (!trace_json.empty()) {
        std::ofstream out(trace_json);
        if (!out) throw io_error("cannot write " + trace_json);
        out << to_json(trace).dump(2) << "\n";
    }
    if (!final_out.empty())
        write_matrix_file(final_out, trace.final_operator.matrix, trace.d, "iterated");
    const MeasurePoint& m = trace.series.back();
    nlohmann::json summary = {
        {"map", to_string(kind)},
        {"stop_reason", to_string(trace.stop_reason)},
        {"n_iterations", trace.n_final},
        {"final_gap", trace.final_gap()},
        {"E_U", m.E_U},
        {"E_US", m.E_US},
        {"ep", m.ep},
        {"class",
         to_string(classify_from_measures(trace.d, m.E_U, m.E_US, opt.class_tol).label)}};
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_measure(const std::string& in) {
    const BipartiteUnitary u = read_bipartite_unitary(in);
    std::cout << to_json(measure_all(u)).dump(2) << "\n";
    return 0;
}

int cmd_ensemble(const std::string& config_path, const std::vector<std::string>& overrides,
                 const std::vector<std::pair<std::string, std::string>>& flag_overrides,
                 const std::string& out_dir, bool dump_two_unitaries) {
    EnsembleConfig cfg =
        config_path.empty() ? EnsembleConfig{} : load_ensemble_config(config_path);
    for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw parameter_error("ensemble: override '" + kv + "' is not key=value");
        apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& [key, value] : flag_overrides) apply_config_entry(cfg, key, value);
    const EnsembleReport report = run_ensemble(cfg);

    std::filesystem::create_directories(out_dir);
    const auto path = [&](const std::string& name) {
        return (std::filesystem::path(out_dir) / name).string();
    };
    {
        std::ofstream out(path("report.json"));
        if (!out) throw io_error("cannot write " + path("report.json"));
        out << to_json(report).dump(2) << "\n";
    }
    for (const CheckpointHistograms& ch : report.histograms) {
        write_histogram_csv(path("hist_EU_n" + std::to_string(ch.n) + ".csv"), ch.E_U);
        write_histogram_csv(path("hist_ep_n" + std::to_string(ch.n) + ".csv"), ch.ep);
    }
    if (dump_two_unitaries)
        for (const auto& [seed, mat] : report.two_unitary_operators)
            write_matrix_file(path("two_unitary_seed" + std::to_string(seed) + ".mat"), mat,
                              cfg.d, "two_unitary");

    std::cout << "ensemble: d=" << cfg.d << " map=" << to_string(cfg.map)
              << " seeds=" << cfg.n_seeds << " n_iter=" << cfg.n_iter << "\n";
    for (const auto& [label, frac] : report.fractions)
        std::cout << "  " << label << ": " << frac << "\n";
    std::cout << "  wall_time_s: " << report.wall_time_seconds << "\n";
    std::cout << "report written to " << out_dir << "\n";
    return 0;
}

int cmd_cartan(const std::string& in, int n, const std::string& map_name,
               const std::string& out) {
    const BipartiteUnitary u = read_bipartite_unitary(in);
    if (n <= 0) {
        const CartanCoords c = cartan_coords(u);
        std::printf("%.12f %.12f %.12f\n", c.c1, c.c2, c.c3);
        return 0;
    }
    const auto coords = chamber_trajectory(u, map_kind_from_string(map_name), n);
    if (out.empty()) {
        for (size_t k = 0; k < coords.size(); ++k)
            std::printf("%zu %.12f %.12f %.12f\n", k, coords[k].c1, coords[k].c2, coords[k].c3);
    } else {
        write_chamber_csv(out, coords);
        std::cout << "trajectory written to " << out << "\n";
    }
    return 0;
}

int cmd_gates_list() {
    std::cout << "name      d      class\n";
    for (const std::string& name : named_gate_names()) {
        const std::vector<int> dims = (name == "cnot" || name == "dcnot")
                                          ? std::vector<int>{2}
                                          : std::vector<int>{2, 3};
        for (int d : dims) {
            const NamedGate g = named_gate(name, d);
            std::cout << g.name << (g.name.size() < 8 ? std::string(8 - g.name.size(), ' ') : " ")
                      << "  " << d << "    " << to_string(g.expected_class.label) << "\n";
        }
    }
    std::cout << "ols       3,4,5,7  two_unitary (any prime power except 2; none for 6)\n";
    return 0;
}

int cmd_gates_export(const std::string& name, int d, const std::string& out) {
    const NamedGate g = name == "ols" ? ols_permutation(d) : named_gate(name, d);
    write_matrix_file(out, g.gate.matrix, d, g.name);
    std::cout << "wrote " << g.name << " (d=" << d << ") to " << out << "\n";
    return 0;
}

int cmd_ame(const std::string& in) {
    const BipartiteUnitary u = read_bipartite_unitary(in);
    const auto e = bipartition_entropies(ame_state(u));
    nlohmann::json out = {{"AB|A'B'", e[0]},
                          {"AA'|BB'", e[1]},
                          {"A'B|AB'", e[2]},
                          {"max", op_entanglement_max(u.d)}};
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dual-unitary and 2-unitary gate synthesis via nearest-unitary maps"};
    app.require_subcommand(1);

    // sample
    auto* sample = app.add_subcommand("sample", "draw CUE unitaries and write matrix files");
    int s_d = 2, s_count = 1;
    std::uint64_t s_seed = 0, s_stream = 0;
    std::string s_out = "cue_";
    bool s_guard = false;
    sample->add_option("--d", s_d, "local dimension");
    sample->add_option("--count", s_count, "number of samples");
    sample->add_option("--seed", s_seed, "RNG seed");
    sample->add_option("--stream", s_stream, "RNG stream of the first sample");
    sample->add_option("--out", s_out, "output path prefix");
    sample->add_flag("--override-dim-guard", s_guard, "allow d > 7");

    // iterate
    auto* iter = app.add_subcommand("iterate", "iterate a map on an operator from file");
    std::string i_in, i_map = "MR", i_trace, i_trace_json, i_final;
    int i_n = 0, i_record = 1;
    double i_eps = 1e-8, i_tol = 1e-8;
    iter->add_option("--in", i_in, "input matrix file")->required();
    iter->add_option("--map", i_map, "MR|MT|MTR|MRT");
    iter->add_option("--n", i_n, "max iterations (0 = default for the dimension)");
    iter->add_option("--eps", i_eps, "convergence gap");
    iter->add_option("--tol", i_tol, "classification tolerance for the class column");
    iter->add_option("--record-every", i_record, "trace row stride");
    iter->add_option("--trace-out", i_trace, "trace CSV path");
    iter->add_option("--trace-json", i_trace_json, "trace JSON path");
    iter->add_option("--final-out", i_final, "final operator matrix file");

    // measure
    auto* meas = app.add_subcommand("measure", "print the measure record of an operator as JSON");
    std::string m_in;
    meas->add_option("--in", m_in, "input matrix file")->required();

    // ensemble (flags mirror the config keys and win over the file)
    auto* ens = app.add_subcommand("ensemble", "run a seeded trajectory ensemble");
    std::string e_config, e_out = "ensemble_out", e_map;
    std::vector<std::string> e_set;
    bool e_dump = false, e_guard = false;
    int e_d = 0, e_seeds = 0, e_n = 0, e_bins = 0;
    double e_eps = 0.0, e_tol = 0.0;
    std::int64_t e_seed = -1, e_stream = -1;
    ens->add_option("--config", e_config, "key=value config file");
    ens->add_option("--set", e_set, "config overrides key=value (repeatable, win over file)");
    ens->add_option("--d", e_d, "local dimension");
    ens->add_option("--seeds", e_seeds, "number of seed operators");
    ens->add_option("--map", e_map, "MR|MT|MTR|MRT");
    ens->add_option("--n", e_n, "iterations per trajectory");
    ens->add_option("--eps", e_eps, "per-trajectory convergence gap");
    ens->add_option("--tol", e_tol, "classification tolerance");
    ens->add_option("--bins", e_bins, "histogram bins");
    ens->add_option("--seed", e_seed, "RNG seed");
    ens->add_option("--stream", e_stream, "RNG base stream");
    ens->add_flag("--override-dim-guard", e_guard, "allow d > 7");
    ens->add_option("--out", e_out, "output directory");
    ens->add_flag("--dump-two-unitaries", e_dump, "write matrix files for two_unitary hits");

    // cartan
    auto* car = app.add_subcommand("cartan", "Weyl-chamber coordinates / trajectory (d = 2)");
    std::string c_in, c_map = "MR", c_out;
    int c_n = 0;
    car->add_option("--in", c_in, "input matrix file")->required();
    car->add_option("--n", c_n, "trajectory length (0 = coordinates only)");
    car->add_option("--map", c_map, "MR|MT|MTR|MRT");
    car->add_option("--out", c_out, "trajectory CSV path");

    // gates
    auto* gates = app.add_subcommand("gates", "list or export reference gates");
    auto* glist = gates->add_subcommand("list", "list named gates");
    auto* gexport = gates->add_subcommand("export", "write a named gate to a matrix file");
    std::string g_name = "swap", g_out = "gate.mat";
    int g_d = 2;
    gexport->add_option("--name", g_name, "identity|swap|cnot|dcnot|fourier|ols");
    gexport->add_option("--d", g_d, "local dimension");
    gexport->add_option("--out", g_out, "output file");
    gates->require_subcommand(1);

    // ame
    auto* ame = app.add_subcommand("ame", "bipartition entropies of the four-party state");
    std::string a_in;
    ame->add_option("--in", a_in, "input matrix file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sample) return cmd_sample(s_d, s_count, s_seed, s_stream, s_out, s_guard);
        if (*iter)
            return cmd_iterate(i_in, i_map, i_n, i_eps, i_tol, i_record, i_trace, i_trace_json,
                               i_final);
        if (*meas) return cmd_measure(m_in);
        if (*ens) {
            std::vector<std::pair<std::string, std::string>> flags;
            if (e_d > 0) flags.emplace_back("d", std::to_string(e_d));
            if (e_seeds > 0) flags.emplace_back("n_seeds", std::to_string(e_seeds));
            if (!e_map.empty()) flags.emplace_back("map", e_map);
            if (e_n > 0) flags.emplace_back("n_iter", std::to_string(e_n));
            if (e_eps > 0.0) flags.emplace_back("eps_gap", fmtd(e_eps));
            if (e_tol > 0.0) flags.emplace_back("class_tol", fmtd(e_tol));
            if (e_bins > 0) flags.emplace_back("histogram_bins", std::to_string(e_bins));
            if (e_seed >= 0) flags.emplace_back("seed", std::to_string(e_seed));
            if (e_stream >= 0) flags.emplace_back("stream", std::to_string(e_stream));
            if (e_guard) flags.emplace_back("override_dim_guard", "1");
            return cmd_ensemble(e_config, e_set, flags, e_out, e_dump);
        }
        if (*car) return cmd_cartan(c_in, c_n, c_map, c_out);
        if (*glist) return cmd_gates_list();
        if (*gexport) return cmd_gates_export(g_name, g_d, g_out);
        if (*ame) return cmd_ame(a_in);
    } catch (const dimension_error& e) {
        std::cerr << "error: dimension: " << e.what() << "\n";
        return 1;
    } catch (const parameter_error& e) {
        std::cerr << "error: parameter: " << e.what() << "\n";
        return 1;
    } catch (const precondition_error& e) {
        std::cerr << "error: precondition: " << e.what() << "\n";
        return 1;
    } catch (const existence_error& e) {
        std::cerr << "error: existence: " << e.what() << "\n";
        return 1;
    } catch (const degenerate_input_error& e) {
        std::cerr << "error: degenerate-input: " << e.what() << "\n";
        return 1;
    } catch (const insufficient_data_error& e) {
        std::cerr << "error: insufficient-data: " << e.what() << "\n";
        return 1;
    } catch (const io_error& e) {
        std::cerr << "error: io: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

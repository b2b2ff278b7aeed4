#include "chanfront/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "chanfront/acceptance.hpp"
#include "chanfront/channel2d.hpp"
#include "chanfront/errors.hpp"
#include "chanfront/frontpde.hpp"
#include "chanfront/graph.hpp"
#include "chanfront/ldp.hpp"
#include "chanfront/version.hpp"
#include "chanfront/walker.hpp"

namespace chanfront {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

double bump_ic(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    double c = std::cos(1.5707963267948966 * x);
    return c * c;
}

double kpp_f(double u) { return u * (1.0 - u); }

struct Common {
    int threads = 0;
    std::string out_dir;
};

void write_manifest(const std::string& out_dir, const std::vector<std::string>& argv_copy,
                    const json& extra) {
    if (out_dir.empty()) return;
    fs::create_directories(out_dir);
    json m;
    m["tool"] = "chanfront";
    m["version"] = VERSION;
    m["argv"] = argv_copy;
    m["config"] = extra;
    std::ofstream f(fs::path(out_dir) / "manifest.json");
    f << m.dump(2) << "\n";
    // Wall-clock info lives only in the sidecar log so artifacts stay
    // byte-identical across reruns.
    std::ofstream log(fs::path(out_dir) / "run.log", std::ios::app);
    auto now = std::chrono::system_clock::now().time_since_epoch();
    log << "run at epoch_s="
        << std::chrono::duration_cast<std::chrono::seconds>(now).count() << "\n";
}

json params_json(const GeneratorParams& p) {
    json j;
    j["spine_len_lo"] = p.spine_len_lo;
    j["spine_len_hi"] = p.spine_len_hi;
    j["width_base"] = p.width_base;
    j["width_min"] = p.width_min;
    j["width_max"] = p.width_max;
    j["amplitude"] = p.amplitude;
    j["trig_degree"] = p.trig_degree;
    j["wing_max"] = p.wing_max;
    j["wing_r_min_frac"] = p.wing_r_min_frac;
    j["tip_beta"] = p.tip_beta;
    j["rectangular"] = p.rectangular;
    j["rect_quantum"] = p.rect_quantum;
    return j;
}

void add_param_flags(CLI::App* cmd, GeneratorParams& p) {
    cmd->add_option("--len-lo", p.spine_len_lo, "cell length lower bound");
    cmd->add_option("--len-hi", p.spine_len_hi, "cell length upper bound");
    cmd->add_option("--width-base", p.width_base, "pinned spine width at cell inflow");
    cmd->add_option("--width-min", p.width_min, "minimum spine width");
    cmd->add_option("--width-max", p.width_max, "maximum spine width");
    cmd->add_option("--amplitude", p.amplitude, "total trig width deviation cap");
    cmd->add_option("--degree", p.trig_degree, "trig polynomial degree");
    cmd->add_option("--wing-max", p.wing_max, "bound on wing widths and projections");
    cmd->add_option("--wing-r-min-frac", p.wing_r_min_frac, "minimum |wing_r| as fraction of wing-max");
    cmd->add_option("--tip-beta", p.tip_beta, "wing tip vanishing exponent");
    cmd->add_option("--quantum", p.rect_quantum, "width/length lattice (rectangular mode)");
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
    return v;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
    std::vector<std::uint64_t> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) v.push_back(std::stoull(tok));
    return v;
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"chanfront: KPP front speeds in narrow random channels via metric graphs"};
    app.require_subcommand(0, 1);
    int threads = 0;
    bool print_config = false;
    app.add_option("--threads", threads, "cap worker threads (0 = all cores)");
    app.add_flag("--print-config", print_config, "print default configuration and exit");
    std::vector<std::string> argv_copy(argv, argv + argc);

    // generate ---------------------------------------------------------
    auto* c_gen = app.add_subcommand("generate", "sample a random channel shape");
    std::uint64_t gen_seed = 7;
    int gen_cells = 100;
    std::string gen_out = "shape.json";
    bool gen_flat = false, gen_rect = false;
    GeneratorParams gen_params;
    c_gen->add_option("--seed", gen_seed, "RNG seed");
    c_gen->add_option("--cells", gen_cells, "cells per side");
    c_gen->add_option("--out", gen_out, "output channel file");
    c_gen->add_flag("--flat", gen_flat, "constant-width channel with tiny conserving wings");
    c_gen->add_flag("--rect", gen_rect, "rectangular mode (piecewise-constant widths)");
    add_param_flags(c_gen, gen_params);

    // graph ------------------------------------------------------------
    auto* c_graph = app.add_subcommand("graph", "build the metric graph and dump it");
    std::string graph_shape, graph_out = "graph_out";
    c_graph->add_option("--shape", graph_shape, "channel file")->required();
    c_graph->add_option("--out-dir", graph_out, "output directory");

    // mu ----------------------------------------------------------------
    auto* c_mu = app.add_subcommand("mu", "Lyapunov exponent curve mu(lambda)");
    std::string mu_shape, mu_out = "mu.csv", mu_dir = "plus";
    int mu_cells = 200, mu_points = 60;
    double mu_min = -10.0, mu_max = -1e-4;
    c_mu->add_option("--shape", mu_shape, "channel file")->required();
    c_mu->add_option("--cells", mu_cells, "cells in the ergodic average");
    c_mu->add_option("--direction", mu_dir, "plus, minus or both");
    c_mu->add_option("--grid-points", mu_points, "lambda grid size");
    c_mu->add_option("--lambda-min", mu_min, "most negative lambda");
    c_mu->add_option("--lambda-max", mu_max, "closest-to-zero negative lambda");
    c_mu->add_option("--out", mu_out, "output CSV");

    // rate ---------------------------------------------------------------
    auto* c_rate = app.add_subcommand("rate", "Legendre rate function I(a)");
    std::string rate_shape, rate_out = "rate.csv", rate_dir = "plus", rate_alist = "0.5,1,2,5";
    int rate_cells = 200, rate_points = 60;
    double rate_min = -10.0, rate_max = -1e-4;
    c_rate->add_option("--shape", rate_shape, "channel file")->required();
    c_rate->add_option("--cells", rate_cells, "cells in the ergodic average");
    c_rate->add_option("--direction", rate_dir, "plus or minus");
    c_rate->add_option("--a", rate_alist, "comma-separated a values");
    c_rate->add_option("--grid-points", rate_points, "lambda grid size");
    c_rate->add_option("--lambda-min", rate_min, "most negative lambda");
    c_rate->add_option("--lambda-max", rate_max, "closest-to-zero negative lambda");
    c_rate->add_option("--out", rate_out, "output CSV");

    // speed ---------------------------------------------------------------
    auto* c_speed = app.add_subcommand("speed", "front speeds c*+/- from the rate function");
    std::string speed_shape, speed_out;
    double speed_fprime = 1.0;
    int speed_cells = 300, speed_points = 60;
    double speed_min = -10.0, speed_max = -0.005;
    c_speed->add_option("--shape", speed_shape, "channel file")->required();
    c_speed->add_option("--fprime", speed_fprime, "f'(0) of the KPP nonlinearity");
    c_speed->add_option("--cells", speed_cells, "cells in the ergodic average");
    c_speed->add_option("--grid-points", speed_points, "lambda grid size");
    c_speed->add_option("--lambda-min", speed_min, "most negative lambda");
    c_speed->add_option("--lambda-max", speed_max, "closest-to-zero negative lambda");
    c_speed->add_option("--out", speed_out, "optional output CSV");

    // solve-graph ----------------------------------------------------------
    auto* c_sg = app.add_subcommand("solve-graph", "reaction-diffusion solve on the graph");
    std::string sg_shape, sg_out = "solve_graph_out";
    double sg_T = 40.0, sg_dx = 0.05, sg_snap = 0.5, sg_level = 0.5;
    c_sg->add_option("--shape", sg_shape, "channel file")->required();
    c_sg->add_option("--T", sg_T, "final time");
    c_sg->add_option("--dx", sg_dx, "grid spacing");
    c_sg->add_option("--snap", sg_snap, "snapshot interval");
    c_sg->add_option("--level", sg_level, "front tracking level");
    c_sg->add_option("--out-dir", sg_out, "output directory");

    // solve-2d ----------------------------------------------------------
    auto* c_s2 = app.add_subcommand("solve-2d", "2D epsilon-channel solve (rectangular shapes)");
    std::string s2_shape, s2_out = "solve_2d_out", s2_eps = "0.4,0.2,0.1";
    double s2_T = 2.0, s2_dx = 0.05, s2_dz = 0.05, s2_win = 7.0, s2_snap = 0.25;
    c_s2->add_option("--shape", s2_shape, "rectangular channel file")->required();
    c_s2->add_option("--eps", s2_eps, "comma-separated epsilon values");
    c_s2->add_option("--T", s2_T, "final time");
    c_s2->add_option("--dx", s2_dx, "x spacing");
    c_s2->add_option("--dz", s2_dz, "z spacing");
    c_s2->add_option("--window", s2_win, "half-width of the x window");
    c_s2->add_option("--snap", s2_snap, "snapshot interval");
    c_s2->add_option("--out-dir", s2_out, "output directory");

    // mc -------------------------------------------------------------------
    auto* c_mc = app.add_subcommand("mc", "Monte Carlo hitting-time transform");
    std::string mc_shape, mc_out = "mc_out";
    double mc_start = 5.5, mc_target = 0.5, mc_lambda = -0.5, mc_dt = 0.005, mc_shell = 0.5;
    int mc_paths = 4000;
    bool mc_chain = false;
    std::uint64_t mc_seed = 12345;
    c_mc->add_option("--shape", mc_shape, "channel file")->required();
    c_mc->add_option("--start", mc_start, "start spine coordinate");
    c_mc->add_option("--target", mc_target, "target spine coordinate");
    c_mc->add_option("--lambda", mc_lambda, "transform exponent (<= 0)");
    c_mc->add_option("--paths", mc_paths, "paths (per segment when chained)");
    c_mc->add_option("--dt", mc_dt, "Euler-Maruyama step");
    c_mc->add_option("--shell", mc_shell, "vertex shell radius factor");
    c_mc->add_option("--seed", mc_seed, "RNG seed");
    c_mc->add_flag("--chain", mc_chain, "factor over junction-to-junction passages");
    c_mc->add_option("--out-dir", mc_out, "output directory");

    // validate ----------------------------------------------------------
    auto* c_val = app.add_subcommand("validate", "run the acceptance criteria");
    bool val_quick = false;
    std::string val_only;
    c_val->add_flag("--quick", val_quick, "reduced sizes (same checks)");
    c_val->add_option("--only", val_only, "comma-separated criterion ids");

    // report ---------------------------------------------------------------
    auto* c_rep = app.add_subcommand("report", "LDP-predicted vs PDE-measured speeds per seed");
    std::string rep_seeds = "71,72,73", rep_out = "report_out";
    double rep_fprime = 1.0, rep_T = 40.0;
    int rep_cells = 400;
    GeneratorParams rep_params;
    rep_params.wing_r_min_frac = 0.6;
    c_rep->add_option("--seeds", rep_seeds, "comma-separated seeds");
    c_rep->add_option("--fprime", rep_fprime, "f'(0)");
    c_rep->add_option("--T", rep_T, "PDE final time");
    c_rep->add_option("--cells", rep_cells, "cells in the ergodic average");
    c_rep->add_option("--out-dir", rep_out, "output directory");
    add_param_flags(c_rep, rep_params);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    par::set_max_threads(threads);
    if (print_config) {
        json j;
        j["version"] = VERSION;
        j["threads"] = par::max_threads();
        j["default_params"] = params_json(GeneratorParams{});
        j["walker"] = {{"dt", WalkerConfig{}.dt}, {"shell_factor", WalkerConfig{}.shell_factor}};
        j["lambda_grid"] = {{"points", 60}, {"min", -10.0}, {"max", -1e-4}};
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cout << app.help();
        return 2;
    }

    try {
        if (*c_gen) {
            ChannelShape shape;
            if (gen_flat) {
                shape = flat_channel(gen_cells, gen_params.width_base, gen_params.spine_len_lo,
                                     1e-9, gen_seed);
            } else {
                gen_params.rectangular = gen_rect;
                if (gen_rect) gen_params.amplitude = 0.0;
                shape = sample_channel(gen_params, gen_seed, gen_cells);
            }
            auto violations = validate(shape);
            if (!violations.empty()) throw consistency_error("generated shape failed validation");
            save_channel(shape, gen_out);
            std::cout << "wrote " << gen_out << " (" << shape.n_cells() << " cells per side)\n";
        } else if (*c_graph) {
            ChannelShape shape = load_channel(graph_shape);
            MetricGraph g = build_graph(shape);
            fs::create_directories(graph_out);
            std::ofstream d(fs::path(graph_out) / "graph.txt");
            d << g.dump();
            write_edge_csv(g, (fs::path(graph_out) / "edges.csv").string());
            write_manifest(graph_out, argv_copy, {{"shape", graph_shape}});
            std::cout << "graph: " << g.edges.size() << " edges, " << g.vertices.size()
                      << " vertices, extent [" << g.x_min << ", " << g.x_max << "]\n";
        } else if (*c_mu || *c_rate) {
            bool is_mu = static_cast<bool>(*c_mu);
            std::string shape_path = is_mu ? mu_shape : rate_shape;
            ChannelShape shape = load_channel(shape_path);
            int cells = is_mu ? mu_cells : rate_cells;
            auto grid = default_lambda_grid(is_mu ? mu_points : rate_points,
                                            is_mu ? mu_min : rate_min, is_mu ? mu_max : rate_max);
            std::string dir = is_mu ? mu_dir : rate_dir;
            if (is_mu && dir == "both") {
                SpectralCurve p = mu_curve(shape, grid, Direction::plus, cells);
                SpectralCurve m = mu_curve(shape, grid, Direction::minus, cells);
                std::ofstream f(mu_out);
                f.precision(17);
                f << "direction,lambda,mu,se\n";
                for (std::size_t i = 0; i < grid.size(); ++i)
                    f << "plus," << p.lambda[i] << "," << p.mu[i] << "," << p.se[i] << "\n";
                for (std::size_t i = 0; i < grid.size(); ++i)
                    f << "minus," << m.lambda[i] << "," << m.mu[i] << "," << m.se[i] << "\n";
            } else {
                Direction d = dir == "minus" ? Direction::minus : Direction::plus;
                SpectralCurve c = mu_curve(shape, grid, d, cells);
                if (is_mu)
                    write_mu_csv(c, mu_out);
                else
                    write_rate_csv(c, parse_list(rate_alist), rate_out);
            }
            std::cout << "wrote " << (is_mu ? mu_out : rate_out) << "\n";
        } else if (*c_speed) {
            ChannelShape shape = load_channel(speed_shape);
            auto grid = default_lambda_grid(speed_points, speed_min, speed_max);
            SpectralCurve cp = mu_curve(shape, grid, Direction::plus, speed_cells);
            SpectralCurve cm = mu_curve(shape, grid, Direction::minus, speed_cells);
            FrontSpeeds s = speeds(cp, cm, speed_fprime);
            std::cout << "c*+ = " << s.c_plus << "  c*- = " << s.c_minus
                      << "  (f'(0) = " << speed_fprime << ", residuals " << s.residual_plus
                      << ", " << s.residual_minus << ")\n";
            if (!speed_out.empty()) write_speeds_csv(s, speed_out);
        } else if (*c_sg) {
            ChannelShape shape = load_channel(sg_shape);
            MetricGraph g = build_graph(shape);
            PdeSolution sol = solve(g, bump_ic, kpp_f, sg_T, sg_dx, sg_snap);
            FrontTrace tr = track(sol, sg_level, 0.5);
            fs::create_directories(sg_out);
            write_snapshots_csv(sol, (fs::path(sg_out) / "snapshots.csv").string());
            write_trace_csv(tr, (fs::path(sg_out) / "trace.csv").string());
            {
                std::ofstream sf(fs::path(sg_out) / "summary.csv");
                sf.precision(17);
                sf << "speed_right,speed_left,r2_right,r2_left,monotone,dx,dt\n";
                sf << tr.speed_right << "," << tr.speed_left << "," << tr.r2_right << ","
                   << tr.r2_left << "," << (tr.monotone ? 1 : 0) << "," << sg_dx << ","
                   << sol.dt << "\n";
            }
            write_manifest(sg_out, argv_copy,
                           {{"T", sg_T}, {"dx", sg_dx}, {"shape", sg_shape}});
            std::cout << "front speeds: right " << tr.speed_right << " (R2 " << tr.r2_right
                      << "), left " << tr.speed_left << " (R2 " << tr.r2_left << ")\n";
        } else if (*c_s2) {
            ChannelShape shape = load_channel(s2_shape);
            MetricGraph g = build_graph(shape);
            PdeSolution ref = solve(g, bump_ic, kpp_f, s2_T, s2_dx, s2_snap);
            fs::create_directories(s2_out);
            std::vector<double> eps_list = parse_list(s2_eps);
            std::vector<GraphComparison> cmps;
            for (double eps : eps_list) {
                double est = s2_T * (1.0 / (s2_dx * s2_dx) + 1.0 / (eps * eps * s2_dz * s2_dz));
                if (eps < 0.1)
                    std::cout << "note: eps = " << eps << " needs about " << est
                              << " cell updates per cell; expect a long run\n";
                EpsSolution es = solve_2d(g, shape, eps, nullptr, bump_ic, kpp_f, s2_T, -s2_win,
                                          s2_win, s2_dx, s2_dz, s2_snap);
                cmps.push_back(compare_graph(es, ref));
                std::ostringstream name;
                name << "eps_" << eps << ".csv";
                write_eps_snapshots_csv(es, (fs::path(s2_out) / name.str()).string());
                std::ostringstream mname;
                mname << "mean_eps_" << eps << ".csv";
                write_mean_profile_csv(es, (fs::path(s2_out) / mname.str()).string());
                std::cout << "eps " << eps << ": sup error vs graph " << cmps.back().overall
                          << "\n";
            }
            write_comparison_csv(eps_list, cmps, (fs::path(s2_out) / "comparison.csv").string());
            write_manifest(s2_out, argv_copy, {{"T", s2_T}, {"eps", s2_eps}});
        } else if (*c_mc) {
            ChannelShape shape = load_channel(mc_shape);
            MetricGraph g = build_graph(shape);
            WalkerConfig wc;
            wc.dt = mc_dt;
            wc.shell_factor = mc_shell;
            wc.seed = mc_seed;
            QEstimate q = mc_chain
                              ? estimate_q_chain(g, mc_target, mc_start, mc_lambda, wc, mc_paths)
                              : estimate_q(g, mc_target, mc_start, mc_lambda, wc, mc_paths);
            fs::create_directories(mc_out);
            if (!mc_chain) {
                WalkerConfig hc = wc;
                if (hc.horizon <= 0)
                    hc.horizon = suggested_horizon(std::abs(mc_start - mc_target), mc_lambda);
                HitStats hs = sample_hit(g, mc_start, mc_target, hc, mc_paths);
                write_hit_samples_csv(hs, (fs::path(mc_out) / "hit_samples.csv").string());
            }
            std::ofstream f(fs::path(mc_out) / "q_estimate.csv");
            f.precision(17);
            f << "lambda,q,se,bracket_lo,bracket_hi,censor_rate,paths\n";
            f << mc_lambda << "," << q.value << "," << q.se << "," << q.bracket_lo << ","
              << q.bracket_hi << "," << q.censor_rate << "," << q.n_paths << "\n";
            write_manifest(mc_out, argv_copy,
                           {{"lambda", mc_lambda},
                            {"dt", mc_dt},
                            {"shell_factor", mc_shell},
                            {"horizon", wc.horizon > 0 ? wc.horizon
                                                       : suggested_horizon(std::abs(mc_start - mc_target),
                                                                           mc_lambda)},
                            {"seed", mc_seed}});
            std::cout << "q(" << mc_target << "," << mc_start << "," << mc_lambda
                      << ") = " << q.value << " +- " << q.se << "  bracket [" << q.bracket_lo
                      << ", " << q.bracket_hi << "]\n";
        } else if (*c_val) {
            accept::Options opt;
            opt.quick = val_quick;
            if (!val_only.empty())
                for (double v : parse_list(val_only)) opt.only.push_back(static_cast<int>(v));
            auto results = accept::run_all(opt);
            bool ok = accept::print_table(results, std::cout);
            return ok ? 0 : 1;
        } else if (*c_rep) {
            fs::create_directories(rep_out);
            std::ofstream f(fs::path(rep_out) / "report.csv");
            f.precision(10);
            f << "seed,c_plus,c_minus,pde_speed_right,pde_speed_left,rel_err_right\n";
            auto grid = default_lambda_grid(60, -10.0, -0.01);
            for (std::uint64_t seed : parse_seeds(rep_seeds)) {
                ChannelShape shape = sample_channel(rep_params, seed, rep_cells);
                // Leave tail room for the ratio recursion at the small-lambda
                // end of the grid.
                int mu_cells = std::max(rep_cells / 2, rep_cells - 200);
                SpectralCurve cp = mu_curve(shape, grid, Direction::plus, mu_cells);
                SpectralCurve cm = mu_curve(shape, grid, Direction::minus, mu_cells);
                FrontSpeeds s = speeds(cp, cm, rep_fprime);
                int n_pde = static_cast<int>(1.2 * s.c_plus * rep_T) + 14;
                ChannelShape pde_shape = shape;
                if (static_cast<int>(pde_shape.pos.size()) > n_pde) {
                    pde_shape.pos.resize(n_pde);
                    pde_shape.neg.resize(n_pde);
                }
                MetricGraph g = build_graph(pde_shape);
                PdeSolution sol = solve(g, bump_ic, kpp_f, rep_T, 0.05, 0.5);
                FrontTrace tr = track(sol, 0.5, 0.5);
                double err = std::abs(tr.speed_right - s.c_plus) / s.c_plus;
                f << seed << "," << s.c_plus << "," << s.c_minus << "," << tr.speed_right << ","
                  << tr.speed_left << "," << err << "\n";
                std::cout << "seed " << seed << ": c*+ " << s.c_plus << " pde "
                          << tr.speed_right << " rel err " << err << "\n";
            }
            write_manifest(rep_out, argv_copy, {{"fprime", rep_fprime}, {"T", rep_T}});
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace chanfront

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rbandit/csv.hpp"
#include "rbandit/errors.hpp"
#include "rbandit/experiment.hpp"
#include "rbandit/log.hpp"
#include "rbandit/svg_plot.hpp"
#include "rbandit/theory.hpp"

namespace fs = std::filesystem;
using namespace rbandit;

namespace {

/// Errors while loading a config are config errors, whatever their code.
struct ConfigStageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ExperimentConfig load(const std::string& path, bool allow_grid) {
    try {
        return load_config(path, allow_grid);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::IoError) throw;
        throw ConfigStageError(e.what());
    }
}

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOpts {
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> parallelism;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_config) {
    auto* c = cmd->add_option("--config", o.config, "experiment config (JSON)");
    if (need_config) c->required();
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "master seed, overrides the config");
    cmd->add_option("--parallelism", o.parallelism, "worker threads, overrides the config")->check(CLI::PositiveNumber);
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) fail(ErrorCode::IoError, "cannot write " + (dir / name).string());
    return f;
}

int cmd_run(const CommonOpts& o, bool sweep) {
    const auto cfg = load(o.config, sweep);
    log::info("experiment " + cfg.experiment_id + ": " + std::to_string(expand_cells(cfg).size()) + " cell(s), " +
              std::to_string(cfg.n_trials) + " trials each");
    const auto result = run_experiment(cfg, o.seed, o.parallelism);
    {
        auto f = open_out(o.out, cfg.csv_name);
        write_results_csv(f, cfg, result);
    }
    {
        auto f = open_out(o.out, cfg.summary_name);
        f << result.summary.dump(2) << '\n';
    }
    log::info("wrote " + (fs::path(o.out) / cfg.csv_name).string());
    for (const auto& c : result.cells)
        log::debug(c.cell.key() + " mean regret " + csv::format_double(c.trials.stats.mean_regret));
    return kExitOk;
}

int cmd_oracle(const CommonOpts& o, std::optional<std::size_t> trials) {
    const auto cfg = load(o.config, false);
    if (cfg.horizons.size() != 1) fail(ErrorCode::ConfigInvalid, "oracle needs a single T");
    const auto cells = expand_cells(cfg);
    const auto& cell = cells.front();
    const auto factory = make_policy_factory(cell.policy, cell.horizon, *cell.reservoir);
    const std::uint64_t cap = cfg.oracle && cfg.oracle->fresh_cap ? *cfg.oracle->fresh_cap
                                                                  : fresh_draws_of(*cell.reservoir, factory, cell.horizon);
    const auto metric = cfg.oracle ? cfg.oracle->metric : std::nullopt;
    const auto rep = run_oracle(*cell.reservoir, factory, cell.horizon, cap, trials.value_or(cfg.n_trials),
                                o.seed.value_or(cfg.master_seed), o.parallelism.value_or(cfg.parallelism), metric);
    auto j = to_json(rep);
    j["experiment_id"] = cfg.experiment_id;
    j["policy"] = cfg.policy.id;
    j["T"] = cell.horizon;
    j["L_cap"] = cap;
    auto f = open_out(o.out, "oracle.json");
    f << j.dump(2) << '\n';
    log::info("oracle " + rep.metric + ": exact " + csv::format_double(rep.exact) + ", mc " +
              csv::format_double(rep.mc_estimate) + (rep.pass ? " (pass)" : " (FAIL)"));
    return kExitOk;
}

struct CurveOpts {
    std::string bound;
    std::vector<double> horizon, p_star, delta, param;
    std::string out = ".";
    std::string name;
};

int cmd_curves(const CurveOpts& o) {
    const auto id = theory::parse_bound_id(o.bound);
    if (!id) fail(ErrorCode::ConfigInvalid, "unknown bound id '" + o.bound + "'");
    const auto curve = theory::evaluate_curve(*id, {o.horizon, o.p_star, o.delta, o.param});
    auto f = open_out(o.out, o.name.empty() ? "curves_" + o.bound + ".csv" : o.name);
    f << "bound_id,T,p_star,delta,gamma_or_epsilon,value,vacuous_flag\n";
    for (const auto& p : curve.points)
        f << o.bound << ',' << csv::format_double(p.horizon) << ',' << csv::format_double(p.p_star) << ','
          << csv::format_double(p.delta) << ',' << csv::format_double(p.gamma_or_epsilon) << ','
          << csv::format_double(p.value) << ',' << (p.vacuous ? 1 : 0) << '\n';
    return kExitOk;
}

struct PlotOpts {
    std::string csv_path;
    std::string curves_path;
    std::string metric = "regret";
    std::vector<std::string> series{"policy"};
    bool linear_x = false;
    bool linear_y = false;
    std::string title;
    std::string out = ".";
    std::string name = "plot.svg";
};

int cmd_plot(const PlotOpts& o) {
    plot::PlotSpec spec;
    spec.metric = o.metric == "error" ? plot::Metric::ErrorRate : plot::Metric::Regret;
    spec.log_x = !o.linear_x;
    spec.log_y = spec.metric == plot::Metric::Regret && !o.linear_y;
    spec.series_by = o.series;
    spec.title = o.title;
    auto series = plot::series_from_results(csv::read_file(o.csv_path), spec);
    if (!o.curves_path.empty()) {
        auto extra = plot::series_from_curves(csv::read_file(o.curves_path));
        series.insert(series.end(), extra.begin(), extra.end());
    }
    auto f = open_out(o.out, o.name);
    plot::render_svg(f, series, spec);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reservoir bandit experiments"};
    app.require_subcommand(1);

    CommonOpts run_o, sweep_o, oracle_o;
    auto* run = app.add_subcommand("run", "run one experiment");
    add_common(run, run_o, true);
    auto* sweep = app.add_subcommand("sweep", "run a grid of experiment cells");
    add_common(sweep, sweep_o, true);
    auto* oracle = app.add_subcommand("oracle", "exact enumeration vs Monte Carlo on a tiny instance");
    add_common(oracle, oracle_o, true);
    std::optional<std::size_t> oracle_trials;
    oracle->add_option("--trials", oracle_trials, "Monte Carlo trials, overrides n_trials");

    CurveOpts curve_o;
    auto* curves = app.add_subcommand("curves", "export a theory bound over a grid");
    curves->add_option("--bound", curve_o.bound, "bound id")->required();
    curves->add_option("--T", curve_o.horizon, "horizon grid")->required();
    curves->add_option("--p-star", curve_o.p_star, "p* grid")->required();
    curves->add_option("--delta", curve_o.delta, "gap grid")->required();
    curves->add_option("--param", curve_o.param, "gamma, epsilon or c grid");
    curves->add_option("--out", curve_o.out, "output directory");
    curves->add_option("--name", curve_o.name, "output file name");

    PlotOpts plot_o;
    auto* plot = app.add_subcommand("plot", "render a result CSV as SVG");
    plot->add_option("--csv", plot_o.csv_path, "result CSV")->required();
    plot->add_option("--curves", plot_o.curves_path, "theory curves CSV to overlay");
    plot->add_option("--metric", plot_o.metric, "regret or error")->check(CLI::IsMember({"regret", "error"}));
    plot->add_option("--series", plot_o.series, "columns naming a series");
    plot->add_flag("--linear-x", plot_o.linear_x, "linear T axis");
    plot->add_flag("--linear-y", plot_o.linear_y, "linear value axis");
    plot->add_option("--title", plot_o.title, "chart title");
    plot->add_option("--out", plot_o.out, "output directory");
    plot->add_option("--name", plot_o.name, "output file name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) return cmd_run(run_o, false);
        if (*sweep) return cmd_run(sweep_o, true);
        if (*oracle) return cmd_oracle(oracle_o, oracle_trials);
        if (*curves) return cmd_curves(curve_o);
        if (*plot) return cmd_plot(plot_o);
    } catch (const ConfigStageError& e) {
        log::error(e.what());
        return kExitConfig;
    } catch (const Error& e) {
        log::error(e.what());
        return e.code() == ErrorCode::ConfigInvalid ? kExitConfig : kExitRuntime;
    } catch (const std::exception& e) {
        log::error(e.what());
        return kExitRuntime;
    }
    return kExitRuntime;
}

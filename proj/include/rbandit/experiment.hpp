#pragma once
/*
Experiment configuration and the run / sweep / oracle drivers behind the CLI.

A config is one JSON document:

  {
    "experiment_id": "ucb-small",
    "reservoir": {"types": [...]}                                   inline spec
               | {"two_type": {"mu_star": 0.5, "delta": 0.2, "p_star": 0.1}}
               | {"hard_instance": {"kind": "bai", "delta": 0.2, "p_star": 0.1,
                                    "variant": 1, "q_star": 0.01}},
    "policy": {"id": "sampling_ucb", "gamma": 0.5, "L": 20 | "p_star_hint": 0.1},
    "T": 1000 | [1000, 5000],
    "n_trials": 100,
    "master_seed": 42,
    "parallelism": 1,
    "grid": {"p_star": [...], "delta": [...], "gamma" | "epsilon" | "m": [...]},
    "output": {"csv": "results.csv", "summary": "summary.json"},
    "oracle": {"L_cap": 2, "metric": "regret" | "error"}
  }

Policy ids: sampling_ucb, classical_ucb (gamma, L | p_star_hint), elimination,
halving (epsilon, optional c_bar), uniform_commit (m). When a UCB policy has
neither L nor p_star_hint, L is calibrated with the reservoir's true p*.
"grid" is only accepted by sweep; p_star and delta dimensions need a
parametric reservoir (two_type or hard_instance).
*/

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "rbandit/csv.hpp"
#include "rbandit/elimination.hpp"
#include "rbandit/engine.hpp"
#include "rbandit/enumerate.hpp"
#include "rbandit/errors.hpp"
#include "rbandit/reservoir.hpp"
#include "rbandit/reservoir_json.hpp"
#include "rbandit/sampling_ucb.hpp"
#include "rbandit/theory.hpp"

namespace rbandit {

struct TwoTypeSource {
    double mu_star = 0.5;
    double delta = 0.2;
    double p_star = 0.1;
    bool operator==(const TwoTypeSource&) const = default;
};

struct HardInstanceSource {
    HardInstanceKind kind = HardInstanceKind::Bai;
    double delta = 0.2;
    double p_star = 0.1;
    int variant = 0;
    std::optional<double> q_star;
    bool operator==(const HardInstanceSource&) const = default;
};

struct InlineSource {
    nlohmann::json types;
    bool operator==(const InlineSource&) const = default;
};

using ReservoirSource = std::variant<InlineSource, TwoTypeSource, HardInstanceSource>;

struct PolicySpec {
    std::string id;
    std::optional<double> gamma;
    std::optional<std::uint64_t> L;
    std::optional<double> p_star_hint;
    std::optional<double> epsilon;
    std::optional<double> c_bar;
    std::optional<std::uint64_t> m;
    bool operator==(const PolicySpec&) const = default;
};

struct SweepGrid {
    std::optional<std::vector<double>> p_star;
    std::optional<std::vector<double>> delta;
    std::optional<std::vector<double>> policy_param;
    bool operator==(const SweepGrid&) const = default;
};

struct OracleSettings {
    std::optional<std::uint64_t> fresh_cap;
    std::optional<std::string> metric;
    bool operator==(const OracleSettings&) const = default;
};

struct ExperimentConfig {
    std::string experiment_id = "experiment";
    ReservoirSource reservoir = TwoTypeSource{};
    PolicySpec policy;
    std::vector<std::uint64_t> horizons;
    std::size_t n_trials = 1;
    std::uint64_t master_seed = 0;
    unsigned parallelism = 1;
    std::optional<SweepGrid> grid;
    std::string csv_name = "results.csv";
    std::string summary_name = "summary.json";
    std::optional<OracleSettings> oracle;
    bool operator==(const ExperimentConfig&) const = default;
};

inline bool is_known_policy(std::string_view id) {
    return id == "sampling_ucb" || id == "classical_ucb" || id == "elimination" || id == "halving" ||
           id == "uniform_commit";
}

inline bool is_ucb_policy(std::string_view id) { return id == "sampling_ucb" || id == "classical_ucb"; }

/// Name of the swept policy parameter for a policy id.
inline std::string_view policy_param_name(std::string_view id) {
    if (is_ucb_policy(id)) return "gamma";
    if (id == "uniform_commit") return "m";
    return "epsilon";
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

[[noreturn]] inline void config_error(const std::string& what) { fail(ErrorCode::ConfigInvalid, what); }

inline double get_number(const nlohmann::json& j, const char* key, std::string_view where) {
    if (!j.contains(key) || !j.at(key).is_number())
        config_error(std::string(where) + ": '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline std::optional<double> opt_number(const nlohmann::json& j, const char* key, std::string_view where) {
    if (!j.contains(key)) return std::nullopt;
    return get_number(j, key, where);
}

inline std::uint64_t as_u64(const nlohmann::json& v, std::string_view where) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        config_error(std::string(where) + " must be a non-negative integer");
    return v.get<std::uint64_t>();
}

inline std::optional<std::uint64_t> opt_u64(const nlohmann::json& j, const char* key, std::string_view where) {
    if (!j.contains(key)) return std::nullopt;
    return as_u64(j.at(key), std::string(where) + "." + key);
}

inline std::vector<double> grid_dim(const nlohmann::json& j, const char* key) {
    const auto& v = j.at(key);
    if (!v.is_array()) config_error(std::string("grid.") + key + " must be an array");
    if (v.empty()) config_error(std::string("grid.") + key + " is empty");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) config_error(std::string("grid.") + key + " must contain numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

inline ReservoirSource parse_reservoir_source(const nlohmann::json& j) {
    if (!j.is_object()) config_error("reservoir must be an object");
    if (j.contains("types")) {
        // Parse eagerly so malformed inline specs fail at config time.
        (void)types_from_json(j);
        return InlineSource{j};
    }
    if (j.contains("two_type")) {
        reject_unknown_keys(j, {"two_type"}, "reservoir");
        const auto& t = j.at("two_type");
        reject_unknown_keys(t, {"mu_star", "delta", "p_star"}, "two_type");
        return TwoTypeSource{get_number(t, "mu_star", "two_type"), get_number(t, "delta", "two_type"),
                             get_number(t, "p_star", "two_type")};
    }
    if (j.contains("hard_instance")) {
        reject_unknown_keys(j, {"hard_instance"}, "reservoir");
        const auto& h = j.at("hard_instance");
        reject_unknown_keys(h, {"kind", "delta", "p_star", "variant", "q_star"}, "hard_instance");
        if (!h.contains("kind") || !h.at("kind").is_string()) config_error("hard_instance.kind must be a string");
        const auto kind = parse_hard_instance_kind(h.at("kind").get<std::string>());
        if (!kind) config_error("unknown hard_instance kind '" + h.at("kind").get<std::string>() + "'");
        HardInstanceSource src;
        src.kind = *kind;
        src.delta = get_number(h, "delta", "hard_instance");
        src.p_star = get_number(h, "p_star", "hard_instance");
        src.variant = h.contains("variant") ? static_cast<int>(as_u64(h.at("variant"), "hard_instance.variant")) : 0;
        src.q_star = opt_number(h, "q_star", "hard_instance");
        return src;
    }
    config_error("reservoir needs one of 'types', 'two_type', 'hard_instance'");
}

inline PolicySpec parse_policy(const nlohmann::json& j) {
    reject_unknown_keys(j, {"id", "gamma", "L", "p_star_hint", "epsilon", "c_bar", "m"}, "policy");
    if (!j.contains("id") || !j.at("id").is_string()) config_error("policy.id must be a string");
    PolicySpec p;
    p.id = j.at("id").get<std::string>();
    if (!is_known_policy(p.id)) config_error("unknown policy id '" + p.id + "'");
    p.gamma = opt_number(j, "gamma", "policy");
    p.L = opt_u64(j, "L", "policy");
    p.p_star_hint = opt_number(j, "p_star_hint", "policy");
    p.epsilon = opt_number(j, "epsilon", "policy");
    p.c_bar = opt_number(j, "c_bar", "policy");
    p.m = opt_u64(j, "m", "policy");
    if (p.L && p.p_star_hint) config_error("policy: L and p_star_hint are mutually exclusive");
    if (!is_ucb_policy(p.id) && (p.gamma || p.L || p.p_star_hint))
        config_error("policy: gamma/L/p_star_hint only apply to UCB policies");
    if ((p.id != "elimination" && p.id != "halving") && (p.epsilon || p.c_bar))
        config_error("policy: epsilon/c_bar only apply to elimination policies");
    if (p.id != "uniform_commit" && p.m) config_error("policy: m only applies to uniform_commit");
    if (p.id == "uniform_commit" && !p.m) config_error("policy: uniform_commit requires m");
    return p;
}

} // namespace detail

inline void check_config(const ExperimentConfig& c);

/// Parses and fully validates a config: every grid cell's reservoir and policy
/// is built once, so bad values fail here rather than mid-run.
inline ExperimentConfig parse_config(const nlohmann::json& j, bool allow_grid) {
    using namespace detail;
    reject_unknown_keys(j,
                        {"experiment_id", "reservoir", "policy", "T", "n_trials", "master_seed", "parallelism", "grid",
                         "output", "oracle"},
                        "config");
    ExperimentConfig c;
    if (j.contains("experiment_id")) {
        if (!j.at("experiment_id").is_string()) config_error("experiment_id must be a string");
        c.experiment_id = j.at("experiment_id").get<std::string>();
        if (c.experiment_id.find_first_of(",\"\n") != std::string::npos)
            config_error("experiment_id may not contain commas, quotes or newlines");
    }
    if (!j.contains("reservoir")) config_error("missing 'reservoir'");
    c.reservoir = parse_reservoir_source(j.at("reservoir"));
    if (!j.contains("policy")) config_error("missing 'policy'");
    c.policy = parse_policy(j.at("policy"));

    if (!j.contains("T")) config_error("missing 'T'");
    const auto& t = j.at("T");
    if (t.is_array()) {
        if (t.empty()) config_error("T grid is empty");
        for (const auto& x : t) c.horizons.push_back(as_u64(x, "T"));
    } else {
        c.horizons.push_back(as_u64(t, "T"));
    }
    for (auto h : c.horizons)
        if (h < 1) config_error("T must be at least 1");

    if (j.contains("n_trials")) c.n_trials = as_u64(j.at("n_trials"), "n_trials");
    if (c.n_trials < 1) config_error("n_trials must be at least 1");
    if (j.contains("master_seed")) c.master_seed = as_u64(j.at("master_seed"), "master_seed");
    if (j.contains("parallelism")) c.parallelism = static_cast<unsigned>(as_u64(j.at("parallelism"), "parallelism"));
    if (c.parallelism < 1) config_error("parallelism must be at least 1");

    if (j.contains("grid")) {
        if (!allow_grid) config_error("'grid' is only valid for sweep");
        const auto& g = j.at("grid");
        const std::string param(policy_param_name(c.policy.id));
        if (!g.is_object()) config_error("grid must be an object");
        for (const auto& [key, _] : g.items())
            if (key != "p_star" && key != "delta" && key != param)
                config_error("grid dimension '" + key + "' does not apply to policy " + c.policy.id);
        SweepGrid grid;
        if (g.contains("p_star")) grid.p_star = grid_dim(g, "p_star");
        if (g.contains("delta")) grid.delta = grid_dim(g, "delta");
        if (g.contains(param)) grid.policy_param = grid_dim(g, param.c_str());
        if ((grid.p_star || grid.delta) && std::holds_alternative<InlineSource>(c.reservoir))
            config_error("p_star/delta grids need a two_type or hard_instance reservoir");
        c.grid = std::move(grid);
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        reject_unknown_keys(o, {"csv", "summary"}, "output");
        if (o.contains("csv")) c.csv_name = o.at("csv").get<std::string>();
        if (o.contains("summary")) c.summary_name = o.at("summary").get<std::string>();
    }
    if (j.contains("oracle")) {
        const auto& o = j.at("oracle");
        reject_unknown_keys(o, {"L_cap", "metric"}, "oracle");
        OracleSettings s;
        s.fresh_cap = opt_u64(o, "L_cap", "oracle");
        if (o.contains("metric")) {
            s.metric = o.at("metric").get<std::string>();
            if (*s.metric != "regret" && *s.metric != "error") config_error("oracle.metric must be regret or error");
        }
        c.oracle = s;
    }
    check_config(c);
    return c;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["experiment_id"] = c.experiment_id;
    std::visit(
        [&](const auto& src) {
            using S = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<S, InlineSource>) {
                j["reservoir"] = src.types;
            } else if constexpr (std::is_same_v<S, TwoTypeSource>) {
                j["reservoir"] = {{"two_type", {{"mu_star", src.mu_star}, {"delta", src.delta}, {"p_star", src.p_star}}}};
            } else {
                nlohmann::json h{{"kind", to_string(src.kind)},
                                 {"delta", src.delta},
                                 {"p_star", src.p_star},
                                 {"variant", src.variant}};
                if (src.q_star) h["q_star"] = *src.q_star;
                j["reservoir"] = {{"hard_instance", h}};
            }
        },
        c.reservoir);
    nlohmann::json p{{"id", c.policy.id}};
    if (c.policy.gamma) p["gamma"] = *c.policy.gamma;
    if (c.policy.L) p["L"] = *c.policy.L;
    if (c.policy.p_star_hint) p["p_star_hint"] = *c.policy.p_star_hint;
    if (c.policy.epsilon) p["epsilon"] = *c.policy.epsilon;
    if (c.policy.c_bar) p["c_bar"] = *c.policy.c_bar;
    if (c.policy.m) p["m"] = *c.policy.m;
    j["policy"] = p;
    j["T"] = c.horizons;
    j["n_trials"] = c.n_trials;
    j["master_seed"] = c.master_seed;
    j["parallelism"] = c.parallelism;
    if (c.grid) {
        nlohmann::json g = nlohmann::json::object();
        if (c.grid->p_star) g["p_star"] = *c.grid->p_star;
        if (c.grid->delta) g["delta"] = *c.grid->delta;
        if (c.grid->policy_param) g[std::string(policy_param_name(c.policy.id))] = *c.grid->policy_param;
        j["grid"] = g;
    }
    j["output"] = {{"csv", c.csv_name}, {"summary", c.summary_name}};
    if (c.oracle) {
        nlohmann::json o = nlohmann::json::object();
        if (c.oracle->fresh_cap) o["L_cap"] = *c.oracle->fresh_cap;
        if (c.oracle->metric) o["metric"] = *c.oracle->metric;
        j["oracle"] = o;
    }
    return j;
}

inline ExperimentConfig load_config(const std::string& path, bool allow_grid) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open config " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigInvalid, std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j, allow_grid);
}

// ---------------------------------------------------------------------------
// Cells
// ---------------------------------------------------------------------------

/// One point of an experiment grid with its materialised reservoir.
struct Cell {
    std::uint64_t horizon = 1;
    std::shared_ptr<const Reservoir> reservoir;
    PolicySpec policy;
    /// gamma, epsilon or m, when the policy has one.
    std::optional<double> policy_param;

    std::string key() const {
        std::string k = "T=" + std::to_string(horizon) + ",p_star=" + csv::format_double(reservoir->p_star()) +
                        ",delta=" + csv::format_double(reservoir->gap());
        if (policy_param) k += "," + std::string(policy_param_name(policy.id)) + "=" + csv::format_double(*policy_param);
        return k;
    }
};

inline std::shared_ptr<const Reservoir> materialise(const ReservoirSource& src, std::optional<double> p_star,
                                                    std::optional<double> delta) {
    return std::visit(
        [&](const auto& s) -> std::shared_ptr<const Reservoir> {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, InlineSource>) {
                return std::make_shared<const Reservoir>(reservoir_from_json(s.types));
            } else if constexpr (std::is_same_v<S, TwoTypeSource>) {
                return std::make_shared<const Reservoir>(
                    two_type_bernoulli(s.mu_star, delta.value_or(s.delta), p_star.value_or(s.p_star)));
            } else {
                return std::make_shared<const Reservoir>(hard_instance(s.kind, delta.value_or(s.delta),
                                                                       p_star.value_or(s.p_star), s.variant, s.q_star));
            }
        },
        src);
}

inline std::optional<double> base_policy_param(const PolicySpec& p) {
    if (is_ucb_policy(p.id)) return p.gamma.value_or(0.5);
    if (p.id == "uniform_commit") return p.m ? std::optional<double>(static_cast<double>(*p.m)) : std::nullopt;
    return p.epsilon.value_or(1.0);
}

/// Cross product T x p* x delta x policy parameter, in that nesting order.
inline std::vector<Cell> expand_cells(const ExperimentConfig& c) {
    const std::vector<std::optional<double>> none{std::nullopt};
    auto dim = [&](const std::optional<std::vector<double>>& v) {
        if (!v) return none;
        std::vector<std::optional<double>> out(v->begin(), v->end());
        return out;
    };
    const auto ps = c.grid ? dim(c.grid->p_star) : none;
    const auto ds = c.grid ? dim(c.grid->delta) : none;
    const auto params = c.grid ? dim(c.grid->policy_param) : none;

    std::vector<Cell> cells;
    for (auto h : c.horizons)
        for (const auto& p : ps)
            for (const auto& d : ds)
                for (const auto& param : params) {
                    Cell cell;
                    cell.horizon = h;
                    cell.reservoir = materialise(c.reservoir, p, d);
                    cell.policy = c.policy;
                    if (param) {
                        if (is_ucb_policy(c.policy.id)) cell.policy.gamma = *param;
                        else if (c.policy.id == "uniform_commit")
                            cell.policy.m = static_cast<std::uint64_t>(*param);
                        else
                            cell.policy.epsilon = *param;
                    }
                    cell.policy_param = base_policy_param(cell.policy);
                    cells.push_back(std::move(cell));
                }
    return cells;
}

/// Factory for the cell's policy. Fails fast (on the calling thread) for bad parameters.
inline PolicyFactory make_policy_factory(const PolicySpec& p, std::uint64_t horizon, const Reservoir& reservoir) {
    if (is_ucb_policy(p.id)) {
        SamplingUcbConfig cfg;
        cfg.gamma = p.gamma.value_or(0.5);
        cfg.horizon = horizon;
        cfg.L = p.L;
        cfg.p_star_hint = p.p_star_hint;
        if (!cfg.L && !cfg.p_star_hint) cfg.p_star_hint = reservoir.p_star();
        const std::uint64_t size = cfg.sampled_set_size();
        if (p.id == "sampling_ucb") {
            const double gamma = cfg.gamma;
            return [=] { return std::make_unique<SamplingUcb>(size, horizon, SamplingIndex{gamma}); };
        }
        return [=] { return std::make_unique<ClassicalUcb>(classical_ucb_baseline(size, horizon)); };
    }
    if (p.id == "uniform_commit") {
        UniformCommit probe(*p.m, horizon);
        return [m = *p.m, horizon] { return std::make_unique<UniformCommit>(m, horizon); };
    }
    EliminationConfig cfg{p.epsilon.value_or(1.0), horizon, p.id == "elimination", p.c_bar.value_or(0.5)};
    FreshArmElimination probe(cfg);
    return [cfg] { return std::make_unique<FreshArmElimination>(cfg); };
}

inline void check_config(const ExperimentConfig& c) {
    for (const auto& cell : expand_cells(c)) (void)make_policy_factory(cell.policy, cell.horizon, *cell.reservoir);
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& result_columns() {
    static const std::vector<std::string> cols{"experiment_id", "policy",      "T",           "p_star",
                                               "delta",         "policy_param", "trial_index", "seed",
                                               "regret",        "pulls_used",  "recommended_mean",
                                               "is_error",      "wall_time_ms"};
    return cols;
}

inline void write_result_header(std::ostream& out) { out << csv::join(result_columns()) << '\n'; }

inline void write_result_rows(std::ostream& out, const std::string& experiment_id, const Cell& cell,
                              const std::vector<RunResult>& runs) {
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& r = runs[i];
        std::vector<std::string> f{experiment_id,
                                   cell.policy.id,
                                   std::to_string(cell.horizon),
                                   csv::format_double(cell.reservoir->p_star()),
                                   csv::format_double(cell.reservoir->gap()),
                                   cell.policy_param ? csv::format_double(*cell.policy_param) : "",
                                   std::to_string(i),
                                   std::to_string(r.seed),
                                   csv::format_double(r.total_pseudo_regret),
                                   std::to_string(r.pulls_used),
                                   r.recommended_mean ? csv::format_double(*r.recommended_mean) : "",
                                   r.is_error ? (*r.is_error ? "1" : "0") : "",
                                   csv::format_double(r.wall_time_ms)};
        out << csv::join(f) << '\n';
    }
}

inline nlohmann::json to_json(const AggregateStats& s) {
    nlohmann::json j{{"n_trials", s.n_trials},   {"mean", s.mean_regret}, {"std", s.std_regret},
                     {"se", s.se_regret},        {"min", s.min_regret},   {"max", s.max_regret},
                     {"quantiles", {{"0.1", s.q10}, {"0.5", s.q50}, {"0.9", s.q90}}},
                     {"mean_pulls_used", s.mean_pulls}};
    if (s.error_rate) {
        j["error_rate"] = *s.error_rate;
        j["error_wilson95"] = {s.error_wilson95.lo, s.error_wilson95.hi};
        j["errors"] = s.errors;
    } else {
        j["error_rate"] = nullptr;
    }
    return j;
}

/// Theory values for overlay; null where the cell is outside a bound's range.
inline nlohmann::json theory_overlay(const Cell& cell) {
    const double t = static_cast<double>(cell.horizon);
    const double p = cell.reservoir->p_star();
    const double d = cell.reservoir->gap();
    auto guard = [](auto&& fn) -> nlohmann::json {
        try {
            return fn();
        } catch (const Error&) {
            return nullptr;
        }
    };
    const double gamma = cell.policy.gamma.value_or(0.5);
    const double eps = cell.policy.epsilon.value_or(1.0);
    nlohmann::json j;
    j["ucb_regret_upper"] = guard([&] { return nlohmann::json(theory::ucb_regret_upper(t, p, d, gamma)); });
    j["regret_lower"] = guard([&] { return nlohmann::json(theory::regret_lower(t, p, d)); });
    j["bai_error_lower"] = guard([&] { return nlohmann::json(theory::bai_error_lower(t, p, d)); });
    j["bai_error_upper"] = guard([&] {
        const auto b = theory::bai_error_upper(t, p, d, eps);
        return nlohmann::json{{"value", b.value}, {"vacuous", b.vacuous}};
    });
    return j;
}

struct CellResult {
    Cell cell;
    TrialsResult trials;
};

struct ExperimentResult {
    std::vector<CellResult> cells;
    nlohmann::json summary;
};

/// Runs every cell; `parallelism` overrides the config when set.
inline ExperimentResult run_experiment(const ExperimentConfig& c, std::optional<std::uint64_t> seed_override = {},
                                       std::optional<unsigned> parallelism_override = {}) {
    const std::uint64_t seed = seed_override.value_or(c.master_seed);
    const unsigned par = parallelism_override.value_or(c.parallelism);
    ExperimentResult out;
    out.summary = {{"experiment_id", c.experiment_id},
                   {"master_seed", seed},
                   {"policy", c.policy.id},
                   {"cells", nlohmann::json::object()}};
    for (auto& cell : expand_cells(c)) {
        const auto factory = make_policy_factory(cell.policy, cell.horizon, *cell.reservoir);
        auto trials = run_trials(*cell.reservoir, factory, cell.horizon, c.n_trials, seed, par);
        nlohmann::json cj{{"T", cell.horizon},
                          {"p_star", cell.reservoir->p_star()},
                          {"delta", cell.reservoir->gap()},
                          {"policy_param", cell.policy_param ? nlohmann::json(*cell.policy_param) : nlohmann::json()},
                          {"stats", to_json(trials.stats)},
                          {"theory", theory_overlay(cell)}};
        out.summary["cells"][cell.key()] = std::move(cj);
        out.cells.push_back(CellResult{std::move(cell), std::move(trials)});
    }
    return out;
}

inline void write_results_csv(std::ostream& out, const ExperimentConfig& c, const ExperimentResult& r) {
    write_result_header(out);
    for (const auto& cr : r.cells) write_result_rows(out, c.experiment_id, cr.cell, cr.trials.runs);
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

struct OracleReport {
    std::string metric;
    double exact = 0.0;
    double mc_estimate = 0.0;
    double se = 0.0;
    bool pass = false;
    ExactResult exact_detail;
    std::size_t n_trials = 0;
};

inline nlohmann::json to_json(const OracleReport& r) {
    return {{"metric", r.metric},
            {"exact", r.exact},
            {"mc_estimate", r.mc_estimate},
            {"se", r.se},
            {"pass", r.pass},
            {"n_trials", r.n_trials},
            {"exact_regret", r.exact_detail.expected_regret},
            {"exact_error_probability", r.exact_detail.error_probability
                                            ? nlohmann::json(*r.exact_detail.error_probability)
                                            : nlohmann::json()},
            {"probability_mass", r.exact_detail.probability_mass},
            {"paths", r.exact_detail.leaves}};
}

/// Exact enumeration against Monte Carlo on the same policy; pass iff
/// |mc - exact| <= 3 SE.
inline OracleReport run_oracle(const Reservoir& reservoir, const PolicyFactory& factory, std::uint64_t horizon,
                               std::uint64_t fresh_cap, std::size_t n_trials, std::uint64_t master_seed,
                               unsigned parallelism, std::optional<std::string> metric = {}) {
    OracleReport rep;
    rep.exact_detail = enumerate_exact(reservoir, factory, horizon, fresh_cap);
    const bool bai = factory()->makes_recommendation();
    rep.metric = metric.value_or(bai ? "error" : "regret");
    if (rep.metric == "error" && !bai) fail(ErrorCode::ConfigInvalid, "error metric needs a recommending policy");
    rep.exact = rep.metric == "error" ? *rep.exact_detail.error_probability : rep.exact_detail.expected_regret;

    const auto trials = run_trials(reservoir, factory, horizon, n_trials, master_seed, parallelism);
    std::vector<double> xs;
    xs.reserve(n_trials);
    for (const auto& r : trials.runs)
        xs.push_back(rep.metric == "error" ? (r.is_error.value_or(true) ? 1.0 : 0.0) : r.total_pseudo_regret);
    rep.mc_estimate = stats::mean(xs);
    rep.se = stats::standard_error(xs);
    rep.pass = std::abs(rep.mc_estimate - rep.exact) <= 3.0 * rep.se;
    rep.n_trials = n_trials;
    return rep;
}

/// Number of fresh arms a policy will draw, found by simulating one episode
/// (the count does not depend on rewards for the built-in policies).
inline std::uint64_t fresh_draws_of(const Reservoir& reservoir, const PolicyFactory& factory, std::uint64_t horizon) {
    auto p = factory();
    return run_episode(reservoir, *p, horizon, 0).fresh_draws;
}

} // namespace rbandit

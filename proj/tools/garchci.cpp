// garchci: simulate GARCH(1,1) paths, build confidence intervals for
// E X^2 and run coverage experiments.

#include "garchci/distributions.hpp"
#include "garchci/errors.hpp"
#include "garchci/garch.hpp"
#include "garchci/harness.hpp"
#include "garchci/inference.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using nlohmann::json;
using namespace garchci;

struct ModelArgs {
    double a0 = 0.1;
    double a1 = 0.1;
    double b1 = 0.1;
    std::string innovation = "N";
    std::size_t n = 600;
    std::size_t burn_in = kDefaultBurnIn;
    std::uint64_t seed = 42;
    std::uint64_t stream = 0;
};

struct ProtocolArgs {
    std::size_t k_min = 5;
    std::size_t stride = 100;
    std::size_t shifts = 5;
    std::string shift_mode = "suffix";
    std::string inversion = "shortest_shift";
    double mean_tol = 0.2;
    std::size_t max_attempts = kDefaultMaxAttempts;

    LogAvgConfig logavg() const {
        LogAvgConfig cfg;
        cfg.k_min = k_min;
        cfg.shift_stride = stride;
        cfg.n_shifts = shifts;
        cfg.mode = shift_mode == "window" ? ShiftMode::Window : ShiftMode::Suffix;
        cfg.inversion = inversion == "full_sample" ? InversionLength::FullSample : InversionLength::ShortestShift;
        return cfg;
    }
};

void add_model_options(CLI::App* cmd, ModelArgs& m) {
    cmd->add_option("--a0", m.a0, "GARCH level coefficient")->capture_default_str();
    cmd->add_option("--a1", m.a1, "ARCH coefficient")->capture_default_str();
    cmd->add_option("--b1", m.b1, "GARCH coefficient")->capture_default_str();
    cmd->add_option("--innovation", m.innovation, "N, t<nu>, P(<alpha>,<xm>)")->capture_default_str();
    cmd->add_option("--n", m.n, "path length")->capture_default_str();
    cmd->add_option("--burn-in", m.burn_in, "discarded initial steps")->capture_default_str();
    cmd->add_option("--seed", m.seed, "base seed")->capture_default_str();
    cmd->add_option("--stream", m.stream, "stream id (replication index)")->capture_default_str();
}

void add_protocol_options(CLI::App* cmd, ProtocolArgs& p) {
    cmd->add_option("--k-min", p.k_min, "first index kept in the log average")->capture_default_str();
    cmd->add_option("--stride", p.stride, "shift stride")->capture_default_str();
    cmd->add_option("--shifts", p.shifts, "number of shifts")->capture_default_str();
    cmd->add_option("--shift-mode", p.shift_mode, "suffix|window")
        ->check(CLI::IsMember({"suffix", "window"}))
        ->capture_default_str();
    cmd->add_option("--inversion", p.inversion, "shortest_shift|full_sample")
        ->check(CLI::IsMember({"shortest_shift", "full_sample"}))
        ->capture_default_str();
    cmd->add_option("--mean-tol", p.mean_tol, "stable weight mean gate")->capture_default_str();
    cmd->add_option("--max-attempts", p.max_attempts, "stable batch redraw limit")->capture_default_str();
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + path + "' for writing");
    return file;
}

void log_line(const std::string& subcommand, const json& config) {
    std::cerr << json{{"subcommand", subcommand}, {"config", config}}.dump() << '\n';
}

json model_json(const ModelArgs& m) {
    return {{"a0", m.a0}, {"a1", m.a1},       {"b1", m.b1},         {"innovation", m.innovation},
            {"n", m.n},   {"burn_in", m.burn_in}, {"seed", m.seed}, {"stream", m.stream}};
}

json interval_json(const ConfidenceInterval& ci, const LogAvgConfig& cfg) {
    json out = {{"method", ci.method.label()}, {"lo", ci.lo},       {"hi", ci.hi},
                {"length", ci.length()},       {"level", ci.level}, {"center_used", ci.center_used},
                {"inversion_n", ci.inversion_n}};
    if (ci.method.kind == MethodKind::NormalApprox) {
        out["tau2"] = ci.tau2;
    } else {
        out["z_lo"] = ci.z_lo;
        out["z_hi"] = ci.z_hi;
        out["k_min"] = cfg.k_min;
        out["shift_stride"] = cfg.shift_stride;
        out["n_shifts"] = cfg.n_shifts;
    }
    if (ci.method.kind == MethodKind::StableResample) {
        out["p"] = ci.method.p;
        out["y_mean"] = ci.y_mean;
        out["gate_attempts"] = ci.gate_attempts;
    }
    return out;
}

int cmd_simulate(const ModelArgs& m, const std::string& out_path) {
    log_line("simulate", model_json(m));
    const GarchParams params(m.a0, m.a1, m.b1);
    const InnovationSpec spec = InnovationSpec::parse(m.innovation);
    if (!params.second_moment_stationary()) {
        throw NonStationary("a1+b1 >= 1 (a1+b1 = " + std::to_string(m.a1 + m.b1) + ")");
    }

    RngStream rng(m.seed, m.stream);
    RngStream path_rng = rng.substream(0);
    const SamplePath path = simulate(params, spec, m.n, m.burn_in, path_rng);

    json diag;
    diag["mu"] = stationary_mean(params);
    diag["rho2"] = params.rho_squared(fourth_moment(spec));
    try {
        diag["tau2"] = tau_squared(params, spec);
    } catch (const MomentCondition& e) {
        diag["tau2"] = nullptr;
        diag["tau2_error"] = e.what();
    }
    if (m.a1 > 0.0 || m.b1 > 0.0) {
        RngStream diag_rng = rng.substream(1);
        const StationarityCheck st = check_stationarity(params, spec, 100000, diag_rng);
        diag["log_moment_estimate"] = st.log_moment_estimate;
        diag["log_moment_se"] = st.standard_error;
        diag["stationary"] = st.is_stationary;
    }
    diag["sample_mean_x2"] = path.mean();
    std::cerr << json{{"diagnostics", diag}}.dump() << '\n';

    std::ofstream file;
    write_path_csv(open_output(out_path, file), path);
    return 0;
}

int cmd_ci(const ModelArgs& m, const ProtocolArgs& proto, const std::string& input, const std::string& method,
           double p, double level, const std::string& out_path) {
    json cfg_log = model_json(m);
    cfg_log["input"] = input;
    cfg_log["method"] = method;
    cfg_log["p"] = p;
    cfg_log["level"] = level;
    log_line("ci", cfg_log);

    const GarchParams params(m.a0, m.a1, m.b1);
    const InnovationSpec spec = InnovationSpec::parse(m.innovation);
    RngStream rng(m.seed, m.stream);

    SamplePath path;
    if (!input.empty()) {
        std::ifstream in(input);
        if (!in) throw std::runtime_error("cannot read '" + input + "'");
        path = read_path_csv(in);
    } else {
        RngStream path_rng = rng.substream(0);
        path = simulate(params, spec, m.n, m.burn_in, path_rng);
    }

    std::vector<MethodSpec> methods;
    if (method == "all") {
        methods = {MethodSpec::normal(), MethodSpec::asclt(), MethodSpec::stable(p)};
    } else if (method == "stable") {
        methods = {MethodSpec::stable(p)};
    } else {
        methods = {MethodSpec::parse(method)};
    }

    CiContext ctx;
    ctx.params = params;
    ctx.innovation = spec;
    ctx.logavg = proto.logavg();
    ctx.gate = StableGate{proto.mean_tol, proto.max_attempts};

    json out;
    out["n"] = path.size();
    out["sample_mean_x2"] = path.mean();
    out["intervals"] = json::array();
    for (const auto& mth : methods) {
        RngStream method_rng = rng.substream(2 + static_cast<std::uint64_t>(mth.order() * 1000.0));
        try {
            const ConfidenceInterval ci = build_ci(path, mth, 1.0 - level, method_rng, ctx);
            out["intervals"].push_back(interval_json(ci, ctx.logavg));
        } catch (const Error& e) {
            throw Error(mth.label() + ": " + e.what());
        }
    }
    std::ofstream file;
    open_output(out_path, file) << out.dump(2) << '\n';
    return 0;
}

int cmd_coverage(const std::string& config_path, std::optional<std::size_t> reps, std::optional<std::uint64_t> seed,
                 unsigned threads, const std::string& format, const std::string& out_path) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot read config '" + config_path + "'");
    json doc = json::parse(in);
    if (reps) doc["n_reps"] = *reps;
    if (seed) doc["seed"] = *seed;
    ExperimentConfig cfg = experiment_config_from_json(doc);
    cfg.threads = threads;
    log_line("coverage", to_json(cfg));

    const CoverageReport report = run_experiment(cfg);
    std::ofstream file;
    std::ostream& out = open_output(out_path, file);
    if (format == "csv") {
        write_csv(out, report);
    } else {
        out << to_json(report).dump(2) << '\n';
    }
    return 0;
}

int cmd_reproduce(const std::string& table_text, std::uint64_t seed, std::optional<std::size_t> reps,
                  const std::string& only, bool check, unsigned threads, const std::string& format,
                  const std::string& out_path) {
    const TableId table = parse_table_id(table_text);
    ReproduceOptions opts;
    opts.seed = seed;
    opts.n_reps = reps;
    opts.threads = threads;
    if (!only.empty()) opts.filter = GridFilter::parse(only);

    json cfg_log = {{"table", table_text}, {"seed", seed}, {"only", only}, {"check", check}};
    if (reps) cfg_log["n_reps"] = *reps;
    log_line("reproduce", cfg_log);

    const CoverageReport report = reproduce_table(table, opts);
    std::vector<CheckLine> checks;
    if (check) checks = check_against_reference(table, report);

    std::ofstream file;
    std::ostream& out = open_output(out_path, file);
    if (format == "csv") {
        write_csv(out, report);
    } else {
        out << to_json(report, check ? &checks : nullptr).dump(2) << '\n';
    }

    if (!check) return 0;
    bool all = true;
    for (const auto& l : checks) {
        std::cerr << (l.pass ? "PASS " : "FAIL ") << l.innovation << ' ' << l.method << " n=" << l.n << ' '
                  << l.quantity << " reproduced=" << l.reproduced << " reference=" << l.reference
                  << " tol=" << l.tolerance << '\n';
        all = all && l.pass;
    }
    std::cerr << (all ? "check: all cells within tolerance\n" : "check: some cells outside tolerance\n");
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GARCH(1,1) simulation and confidence intervals for E X^2"};
    app.require_subcommand(1);

    ModelArgs model;
    ProtocolArgs proto;
    std::string out_path;
    std::string format = "json";
    unsigned threads = 0;

    auto* sim = app.add_subcommand("simulate", "simulate a path and write it as CSV (k,x2,sigma2)");
    add_model_options(sim, model);
    sim->add_option("--out", out_path, "output file (default stdout)");

    std::string input;
    std::string method = "asclt";
    double p = 1.5;
    double level = 0.95;
    auto* ci = app.add_subcommand("ci", "confidence interval(s) for E X^2 from one path");
    add_model_options(ci, model);
    add_protocol_options(ci, proto);
    ci->add_option("--input", input, "path CSV; simulated from the model options when omitted");
    ci->add_option("--method", method, "normal, normal[residual], normal[batch], asclt, stable, all")
        ->capture_default_str();
    ci->add_option("--p", p, "stable order for --method stable/all")->capture_default_str();
    ci->add_option("--level", level, "nominal coverage")->capture_default_str();
    ci->add_option("--out", out_path, "output file (default stdout)");

    std::string config_path;
    std::optional<std::size_t> reps;
    std::optional<std::uint64_t> seed_override;
    auto* cov = app.add_subcommand("coverage", "run a coverage experiment from a JSON config");
    cov->add_option("--config", config_path, "experiment config (JSON)")->required();
    cov->add_option("--reps", reps, "override n_reps");
    cov->add_option("--seed", seed_override, "override seed");
    cov->add_option("--threads", threads, "worker threads (0 = all cores)");
    cov->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    cov->add_option("--out", out_path, "output file (default stdout)");

    std::string table = "2";
    std::uint64_t seed = 42;
    std::string only;
    bool check = false;
    auto* rep = app.add_subcommand("reproduce", "re-run the reference coverage tables");
    rep->add_option("--table", table, "1 or 2")->required();
    rep->add_option("--seed", seed, "base seed")->capture_default_str();
    rep->add_option("--reps", reps, "replications per cell (default: reference count)");
    rep->add_option("--only", only, "grid filter, e.g. \"p=1.8\" or \"innovation=t8,n=100\"");
    rep->add_flag("--check", check, "compare against reference values; exit 1 on any miss");
    rep->add_option("--threads", threads, "worker threads (0 = all cores)");
    rep->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    rep->add_option("--out", out_path, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) return cmd_simulate(model, out_path);
        if (*ci) return cmd_ci(model, proto, input, method, p, level, out_path);
        if (*cov) return cmd_coverage(config_path, reps, seed_override, threads, format, out_path);
        if (*rep) return cmd_reproduce(table, seed, reps, only, check, threads, format, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

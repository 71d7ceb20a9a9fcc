#include "garchci/harness.hpp"

#include "garchci/errors.hpp"
#include "garchci/inference.hpp"
#include "reference_tables.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace garchci {

namespace {

using nlohmann::json;

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t path_tag(const InnovationSpec& spec, std::size_t n) {
    return splitmix64(fnv1a(spec.label()) ^ splitmix64(n));
}

std::uint64_t method_tag(std::uint64_t path, const MethodSpec& method) {
    return splitmix64(path ^ fnv1a(method.label()));
}

bool same_order(double a, double b) {
    return std::abs(a - b) < 1e-9;
}

struct RepOutcome {
    bool ok = false;
    bool no_interval = false;
    bool covered = false;
    double length = 0.0;
    std::size_t attempts = 0;
    std::string error;
};

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    }
}

std::string shift_mode_name(ShiftMode m) {
    return m == ShiftMode::Suffix ? "suffix" : "window";
}

std::string inversion_name(InversionLength l) {
    return l == InversionLength::ShortestShift ? "shortest_shift" : "full_sample";
}

}  // namespace

void ExperimentConfig::validate() const {
    if (n_reps == 0) throw std::invalid_argument("n_reps must be at least 1");
    if (n == 0) throw std::invalid_argument("path length n must be at least 1");
    if (innovations.empty()) throw std::invalid_argument("at least one innovation law is required");
    if (methods.empty()) throw std::invalid_argument("at least one method is required");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
    if (!params.second_moment_stationary()) throw NonStationary("a1+b1 >= 1: true mu is undefined");
    if (!(stable.mean_tol > 0.0)) throw std::invalid_argument("stable.mean_tol must be positive");
    if (stable.max_attempts == 0) throw std::invalid_argument("stable.max_attempts must be at least 1");
    const bool needs_logavg = std::any_of(methods.begin(), methods.end(),
                                          [](const MethodSpec& m) { return m.kind != MethodKind::NormalApprox; });
    if (needs_logavg) shift_windows(n, logavg);
}

ExperimentConfig experiment_config_from_json(const json& doc) {
    ExperimentConfig cfg;
    if (doc.contains("params")) {
        const auto& p = doc.at("params");
        cfg.params = GarchParams(p.value("a0", 0.1), p.value("a1", 0.1), p.value("b1", 0.1));
    }
    if (doc.contains("innovations")) {
        for (const auto& s : doc.at("innovations")) cfg.innovations.push_back(InnovationSpec::parse(s.get<std::string>()));
    }
    if (doc.contains("methods")) {
        for (const auto& s : doc.at("methods")) cfg.methods.push_back(MethodSpec::parse(s.get<std::string>()));
    }
    cfg.n = doc.value("n", cfg.n);
    cfg.n_reps = doc.value("n_reps", cfg.n_reps);
    cfg.level = doc.value("level", cfg.level);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.burn_in = doc.value("burn_in", cfg.burn_in);
    cfg.threads = doc.value("threads", cfg.threads);
    if (doc.contains("logavg")) {
        const auto& l = doc.at("logavg");
        cfg.logavg.k_min = l.value("k_min", cfg.logavg.k_min);
        cfg.logavg.shift_stride = l.value("shift_stride", cfg.logavg.shift_stride);
        cfg.logavg.n_shifts = l.value("n_shifts", cfg.logavg.n_shifts);
        const std::string mode = l.value("mode", std::string("suffix"));
        if (mode == "suffix") {
            cfg.logavg.mode = ShiftMode::Suffix;
        } else if (mode == "window") {
            cfg.logavg.mode = ShiftMode::Window;
        } else {
            throw std::invalid_argument("logavg.mode must be 'suffix' or 'window'");
        }
        const std::string inv = l.value("inversion", std::string("shortest_shift"));
        if (inv == "shortest_shift") {
            cfg.logavg.inversion = InversionLength::ShortestShift;
        } else if (inv == "full_sample") {
            cfg.logavg.inversion = InversionLength::FullSample;
        } else {
            throw std::invalid_argument("logavg.inversion must be 'shortest_shift' or 'full_sample'");
        }
    }
    if (doc.contains("stable")) {
        const auto& s = doc.at("stable");
        cfg.stable.mean_tol = s.value("mean_tol", cfg.stable.mean_tol);
        cfg.stable.max_attempts = s.value("max_attempts", cfg.stable.max_attempts);
    }
    cfg.validate();
    return cfg;
}

json to_json(const ExperimentConfig& cfg) {
    json doc;
    doc["params"] = {{"a0", cfg.params.a0()}, {"a1", cfg.params.a1()}, {"b1", cfg.params.b1()}};
    doc["innovations"] = json::array();
    for (const auto& s : cfg.innovations) doc["innovations"].push_back(s.label());
    doc["methods"] = json::array();
    for (const auto& m : cfg.methods) doc["methods"].push_back(m.label());
    doc["n"] = cfg.n;
    doc["n_reps"] = cfg.n_reps;
    doc["level"] = cfg.level;
    doc["seed"] = cfg.seed;
    doc["burn_in"] = cfg.burn_in;
    doc["logavg"] = {{"k_min", cfg.logavg.k_min},
                     {"shift_stride", cfg.logavg.shift_stride},
                     {"n_shifts", cfg.logavg.n_shifts},
                     {"mode", shift_mode_name(cfg.logavg.mode)},
                     {"inversion", inversion_name(cfg.logavg.inversion)}};
    doc["stable"] = {{"mean_tol", cfg.stable.mean_tol}, {"max_attempts", cfg.stable.max_attempts}};
    return doc;
}

const CoverageCell* CoverageReport::find(const std::string& innovation, double order, std::size_t n) const {
    for (const auto& c : cells) {
        if (c.innovation == innovation && same_order(c.method.order(), order) && c.n == n) return &c;
    }
    return nullptr;
}

CoverageReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const double alpha = 1.0 - cfg.level;
    const double mu = stationary_mean(cfg.params);
    const std::size_t n_methods = cfg.methods.size();

    CoverageReport report;
    report.configs.push_back(cfg);

    for (const auto& innovation : cfg.innovations) {
        const std::uint64_t ptag = path_tag(innovation, cfg.n);
        std::vector<RepOutcome> outcomes(cfg.n_reps * n_methods);

        CiContext ctx;
        ctx.params = cfg.params;
        ctx.innovation = innovation;
        ctx.logavg = cfg.logavg;
        ctx.gate = cfg.stable;

        parallel_for(cfg.n_reps, cfg.threads, [&](std::size_t r) {
            const RngStream base(cfg.seed, r);
            RepOutcome* row = &outcomes[r * n_methods];
            SamplePath path;
            try {
                RngStream path_rng = base.substream(ptag);
                path = simulate(cfg.params, innovation, cfg.n, cfg.burn_in, path_rng);
            } catch (const std::exception& e) {
                for (std::size_t j = 0; j < n_methods; ++j) row[j].error = e.what();
                return;
            }
            for (std::size_t j = 0; j < n_methods; ++j) {
                try {
                    RngStream method_rng = base.substream(method_tag(ptag, cfg.methods[j]));
                    const ConfidenceInterval ci = build_ci(path, cfg.methods[j], alpha, method_rng, ctx);
                    row[j].ok = true;
                    row[j].covered = ci.contains(mu);
                    row[j].length = ci.length();
                    row[j].attempts = ci.gate_attempts;
                } catch (const MomentCondition& e) {
                    // The plug-in variance does not exist for this path: the
                    // method yields no interval, which counts as a miss.
                    row[j].no_interval = true;
                    row[j].error = e.what();
                } catch (const std::exception& e) {
                    row[j].error = e.what();
                }
            }
        });

        // Ordered reduction by replication index.
        for (std::size_t j = 0; j < n_methods; ++j) {
            CoverageCell cell;
            cell.innovation = innovation.label();
            cell.method = cfg.methods[j];
            cell.n = cfg.n;
            cell.n_reps = cfg.n_reps;
            cell.seed = cfg.seed;
            cell.stream_begin = 0;
            cell.stream_end = cfg.n_reps;
            std::size_t covered = 0;
            double length_sum = 0.0;
            double attempts_sum = 0.0;
            std::size_t with_interval = 0;
            for (std::size_t r = 0; r < cfg.n_reps; ++r) {
                const RepOutcome& o = outcomes[r * n_methods + j];
                if (o.no_interval) {
                    ++cell.successes;
                    ++cell.no_interval;
                    continue;
                }
                if (!o.ok) {
                    ++cell.failures;
                    if (cell.first_failure.empty()) cell.first_failure = "rep " + std::to_string(r) + ": " + o.error;
                    continue;
                }
                ++cell.successes;
                ++with_interval;
                covered += o.covered ? 1 : 0;
                length_sum += o.length;
                attempts_sum += static_cast<double>(o.attempts);
            }
            if (cell.successes > 0) {
                const double s = static_cast<double>(cell.successes);
                cell.coverage = static_cast<double>(covered) / s;
                cell.se = std::sqrt(cell.coverage * (1.0 - cell.coverage) / s);
            }
            if (with_interval > 0) {
                cell.mean_length = length_sum / static_cast<double>(with_interval);
                cell.mean_gate_attempts = attempts_sum / static_cast<double>(with_interval);
            }
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

TableId parse_table_id(const std::string& text) {
    if (text == "1" || text == "table1" || text == "Table1") return TableId::Table1;
    if (text == "2" || text == "table2" || text == "Table2") return TableId::Table2;
    throw std::invalid_argument("table must be 1 or 2, got '" + text + "'");
}

GridFilter GridFilter::parse(const std::string& text) {
    GridFilter f;
    std::istringstream terms(text);
    std::string term;
    static const std::regex term_re(R"(^\s*([A-Za-z_]+)\s*=\s*(.+?)\s*$)");
    while (std::getline(terms, term, ';')) {
        // Allow ',' as a separator except inside P(a,b).
        std::string buf;
        int depth = 0;
        std::vector<std::string> parts;
        for (const char c : term) {
            if (c == '(') ++depth;
            if (c == ')') --depth;
            if (c == ',' && depth == 0) {
                parts.push_back(buf);
                buf.clear();
            } else {
                buf += c;
            }
        }
        parts.push_back(buf);
        for (const auto& part : parts) {
            if (part.find_first_not_of(" \t") == std::string::npos) continue;
            std::smatch m;
            if (!std::regex_match(part, m, term_re)) {
                throw std::invalid_argument("filter term '" + part + "' is not key=value");
            }
            const std::string key = m[1].str();
            const std::string value = m[2].str();
            if (key == "p") {
                f.order = std::stod(value);
            } else if (key == "innovation") {
                f.innovation = InnovationSpec::parse(value).label();
            } else if (key == "n") {
                f.n = static_cast<std::size_t>(std::stoull(value));
            } else {
                throw std::invalid_argument("unknown filter key '" + key + "' (expected p, innovation or n)");
            }
        }
    }
    return f;
}

bool GridFilter::keeps_order(double p) const {
    return !order || same_order(*order, p);
}

bool GridFilter::keeps_innovation(const InnovationSpec& spec) const {
    return !innovation || *innovation == spec.label();
}

bool GridFilter::keeps_n(std::size_t value) const {
    return !n || *n == value;
}

const json& reference_tables() {
    static const json doc = json::parse(detail::kReferenceTablesJson);
    return doc;
}

std::vector<ExperimentConfig> table_configs(TableId table, const ReproduceOptions& opts) {
    const json& ref = reference_tables();
    ExperimentConfig base;
    const auto& p = ref.at("params");
    base.params = GarchParams(p.at("a0").get<double>(), p.at("a1").get<double>(), p.at("b1").get<double>());
    base.level = ref.at("level").get<double>();
    base.n_reps = opts.n_reps.value_or(ref.at("n_reps").get<std::size_t>());
    base.seed = opts.seed;
    base.threads = opts.threads;
    for (const auto& s : ref.at("innovations")) {
        const InnovationSpec spec = InnovationSpec::parse(s.get<std::string>());
        if (opts.filter.keeps_innovation(spec)) base.innovations.push_back(spec);
    }

    std::vector<ExperimentConfig> out;
    if (base.innovations.empty()) return out;
    if (table == TableId::Table1) {
        const auto& t = ref.at("table1");
        const MethodSpec method = MethodSpec::parse(t.at("method").get<std::string>());
        if (!opts.filter.keeps_order(method.order())) return out;
        for (const auto& n : t.at("n")) {
            if (!opts.filter.keeps_n(n.get<std::size_t>())) continue;
            ExperimentConfig cfg = base;
            cfg.n = n.get<std::size_t>();
            cfg.methods = {method};
            out.push_back(cfg);
        }
    } else {
        const auto& t = ref.at("table2");
        ExperimentConfig cfg = base;
        cfg.n = t.at("n").get<std::size_t>();
        if (!opts.filter.keeps_n(cfg.n)) return out;
        for (const auto& o : t.at("orders")) {
            const double order = o.get<double>();
            if (!opts.filter.keeps_order(order)) continue;
            cfg.methods.push_back(order == 2.0 ? MethodSpec::asclt() : MethodSpec::stable(order));
        }
        if (!cfg.methods.empty()) out.push_back(cfg);
    }
    return out;
}

CoverageReport reproduce_table(TableId table, const ReproduceOptions& opts) {
    CoverageReport report;
    for (const auto& cfg : table_configs(table, opts)) {
        CoverageReport part = run_experiment(cfg);
        report.configs.push_back(cfg);
        for (auto& c : part.cells) report.cells.push_back(std::move(c));
    }
    return report;
}

std::vector<CheckLine> check_against_reference(TableId table, const CoverageReport& report) {
    const json& ref = reference_tables();
    const std::size_t ref_reps = ref.at("n_reps").get<std::size_t>();
    const json& t = ref.at(table == TableId::Table1 ? "table1" : "table2");
    const double cov_tol = t.at("tolerance").at("coverage_abs").get<double>();

    auto coverage_tolerance = [&](double reference, std::size_t reps) {
        if (reps >= ref_reps) return cov_tol;
        return std::max(cov_tol, 3.0 * std::sqrt(reference * (1.0 - reference) / static_cast<double>(reps)));
    };

    std::vector<CheckLine> out;
    for (const auto& cell : report.cells) {
        if (!t.at("coverage").contains(cell.innovation)) continue;
        std::size_t col = 0;
        bool found = false;
        if (table == TableId::Table1) {
            const auto& ns = t.at("n");
            for (; col < ns.size(); ++col) {
                if (ns[col].get<std::size_t>() == cell.n) {
                    found = true;
                    break;
                }
            }
        } else {
            const auto& orders = t.at("orders");
            for (; col < orders.size(); ++col) {
                if (same_order(orders[col].get<double>(), cell.method.order())) {
                    found = true;
                    break;
                }
            }
        }
        if (!found) continue;

        CheckLine cov;
        cov.innovation = cell.innovation;
        cov.method = cell.method.label();
        cov.n = cell.n;
        cov.quantity = "coverage";
        cov.reproduced = cell.coverage;
        cov.reference = t.at("coverage").at(cell.innovation).at(col).get<double>();
        cov.tolerance = coverage_tolerance(cov.reference, cell.successes);
        cov.pass = cell.successes > 0 && std::abs(cov.reproduced - cov.reference) <= cov.tolerance;
        out.push_back(cov);

        if (table == TableId::Table2) {
            bool excluded = false;
            for (const auto& ex : t.at("length_excluded")) {
                if (ex.at("innovation").get<std::string>() == cell.innovation &&
                    same_order(ex.at("p").get<double>(), cell.method.order())) {
                    excluded = true;
                }
            }
            if (excluded) continue;
            CheckLine len;
            len.innovation = cell.innovation;
            len.method = cell.method.label();
            len.n = cell.n;
            len.quantity = "length";
            len.reproduced = cell.mean_length;
            len.reference = t.at("length").at(cell.innovation).at(col).get<double>();
            len.tolerance = t.at("tolerance").at("length_rel").get<double>();
            len.pass = cell.successes > 0 && std::abs(len.reproduced / len.reference - 1.0) <= len.tolerance;
            out.push_back(len);
        }
    }
    return out;
}

void write_csv(std::ostream& out, const CoverageReport& report) {
    out << "innovation,method,n,coverage,mean_length,se,failures\n";
    for (const auto& c : report.cells) {
        out << '"' << c.innovation << "\"," << c.method.label() << ',' << c.n << ',' << std::fixed
            << std::setprecision(4) << c.coverage << ',' << std::setprecision(6) << c.mean_length << ','
            << std::setprecision(4) << c.se << ',' << c.failures << '\n';
        out.unsetf(std::ios::floatfield);
    }
}

json to_json(const CoverageReport& report, const std::vector<CheckLine>* checks) {
    json doc;
    doc["configs"] = json::array();
    for (const auto& cfg : report.configs) doc["configs"].push_back(to_json(cfg));
    doc["cells"] = json::array();
    for (const auto& c : report.cells) {
        json cell = {{"innovation", c.innovation},
                     {"method", c.method.label()},
                     {"p", c.method.order()},
                     {"n", c.n},
                     {"coverage", c.coverage},
                     {"mean_length", c.mean_length},
                     {"se", c.se},
                     {"n_reps", c.n_reps},
                     {"successes", c.successes},
                     {"failures", c.failures},
                     {"no_interval", c.no_interval},
                     {"mean_gate_attempts", c.mean_gate_attempts},
                     {"seed", c.seed},
                     {"streams", {c.stream_begin, c.stream_end}}};
        if (!c.first_failure.empty()) cell["first_failure"] = c.first_failure;
        doc["cells"].push_back(std::move(cell));
    }
    if (checks != nullptr) {
        doc["checks"] = json::array();
        bool all = true;
        for (const auto& l : *checks) {
            doc["checks"].push_back({{"innovation", l.innovation},
                                     {"method", l.method},
                                     {"n", l.n},
                                     {"quantity", l.quantity},
                                     {"reproduced", l.reproduced},
                                     {"reference", l.reference},
                                     {"tolerance", l.tolerance},
                                     {"pass", l.pass}});
            all = all && l.pass;
        }
        doc["all_pass"] = all;
    }
    return doc;
}

}  // namespace garchci

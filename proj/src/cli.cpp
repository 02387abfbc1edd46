#include "diracgap/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "diracgap/errors.hpp"
#include "diracgap/hardy.hpp"
#include "diracgap/kernel.hpp"
#include "diracgap/minimax.hpp"
#include "diracgap/radial.hpp"

namespace diracgap::cli {

namespace {

template <class T>
void read_key(const Json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = j.at(key).get<T>();
}

template <class T>
void read_key(const Json& j, const char* key, std::optional<T>& dst) {
    if (j.contains(key)) dst = j.at(key).get<T>();
}

}  // namespace

RunConfig apply_config_json(const Json& j, RunConfig c) {
    if (!j.is_object()) fail(ErrorKind::Config, "config file must hold a JSON object");
    static const char* const known[] = {"dim",     "nu",      "potential_table", "kappa_max", "r_min",  "r_max",
                                        "nodes",   "p_min",   "p_max",           "cells",     "method", "tol",
                                        "seed",    "format",  "output",          "k",         "enrich", "samples",
                                        "slack",   "kmax",    "two_m",           "jmax",      "nus",    "timing",
                                        "threads"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) fail(ErrorKind::Config, "unknown config key '" + it.key() + "'");
    }
    try {
        read_key(j, "dim", c.dim);
        read_key(j, "nu", c.nu);
        read_key(j, "potential_table", c.potential_table);
        read_key(j, "kappa_max", c.kappa_max);
        read_key(j, "r_min", c.r_min);
        read_key(j, "r_max", c.r_max);
        read_key(j, "nodes", c.nodes);
        read_key(j, "p_min", c.p_min);
        read_key(j, "p_max", c.p_max);
        read_key(j, "cells", c.cells);
        read_key(j, "method", c.method);
        read_key(j, "tol", c.tol);
        read_key(j, "seed", c.seed);
        read_key(j, "format", c.format);
        read_key(j, "output", c.output);
        read_key(j, "k", c.k);
        read_key(j, "enrich", c.enrich);
        read_key(j, "samples", c.samples);
        read_key(j, "slack", c.slack);
        read_key(j, "kmax", c.kmax);
        read_key(j, "two_m", c.two_m);
        read_key(j, "jmax", c.jmax);
        read_key(j, "nus", c.nus);
        read_key(j, "timing", c.timing);
        read_key(j, "threads", c.threads);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Config, std::string("bad config value: ") + e.what());
    }
    return c;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open config file " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Config, std::string("config file is not valid JSON: ") + e.what());
    }
    return apply_config_json(j, std::move(base));
}

namespace {

void check_dim(const RunConfig& c) {
    if (c.dim != 2 && c.dim != 3) fail(ErrorKind::Config, "--dim must be 2 or 3");
}

double require_nu(const RunConfig& c) {
    if (!c.nu) fail(ErrorKind::Config, "--nu is required");
    if (!std::isfinite(*c.nu) || *c.nu < 0.0) fail(ErrorKind::Config, "--nu must be a non-negative number");
    return *c.nu;
}

void check_method(const std::string& m) {
    if (m != "talman" && m != "esteban-sere" && m != "both")
        fail(ErrorKind::Config, "--method must be talman, esteban-sere or both");
}

PotentialSpec potential_of(const RunConfig& c) {
    const double nu = require_nu(c);
    if (c.potential_table.empty()) return PotentialSpec::coulomb(nu);
    return load_potential_table(c.potential_table, nu);
}

TalmanOptions talman_options(const RunConfig& c) {
    TalmanOptions o;
    o.mesh.r_min = c.r_min;
    o.mesh.r_max = c.r_max;
    o.mesh.nodes = c.nodes;
    o.enrich = c.enrich;
    o.kappa_max = c.kappa_max.value_or(1.0);
    o.threads = c.threads;
    o.root.tol = c.tol;
    return o;
}

EstebanSereOptions es_options(const RunConfig& c) {
    EstebanSereOptions o;
    o.p_min = c.p_min.value_or(o.p_min);
    o.p_max = c.p_max.value_or(o.p_max);
    o.cells = c.cells.value_or(o.cells);
    o.kappa_max = c.kappa_max.value_or(1.0);
    o.threads = c.threads;
    o.root.tol = c.tol;
    return o;
}

std::vector<std::string> methods_of(const std::string& m) {
    if (m == "both") return {"talman", "esteban-sere"};
    return {m};
}

double ground_analytic(int dim, double nu) {
    const double x = (4.0 - dim) * nu;
    return std::sqrt(1.0 - x * x);
}

Json nullable(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

CommandOutput cmd_eigenvalues(const RunConfig& cfg) {
    check_dim(cfg);
    check_method(cfg.method);
    if (cfg.k < 1) fail(ErrorKind::Config, "--k must be positive");
    const PotentialSpec pot = potential_of(cfg);
    CommandOutput out;
    out.header = {"method", "dim", "nu", "kappa", "channel", "k", "lambda", "residual", "analytic", "rel_error"};
    Json records = Json::array();
    std::vector<double> lambdas, residuals;
    for (const std::string& m : methods_of(cfg.method)) {
        const GapSpectrumResult res = m == "talman" ? talman_eigenvalue(cfg.k, cfg.dim, pot, talman_options(cfg))
                                                    : esteban_sere_eigenvalue(cfg.k, cfg.dim, pot, es_options(cfg));
        const MergedEigenvalue& e = res.kth(cfg.k);
        std::optional<double> analytic, rel;
        if (pot.is_coulomb() && cfg.k == 1) {
            analytic = ground_analytic(cfg.dim, pot.nu);
            rel = std::abs(e.lambda - *analytic) / *analytic;
        }
        Json r;
        r["method"] = m;
        r["dim"] = cfg.dim;
        r["nu"] = pot.nu;
        r["kappa"] = e.channel.kappa.value();
        r["channel"] = e.channel.label();
        r["k"] = cfg.k;
        r["lambda"] = e.lambda;
        r["residual"] = e.residual;
        r["analytic"] = nullable(analytic);
        r["rel_error"] = nullable(rel);
        r["trusted_below"] = res.trusted_below;
        r["mesh"] = res.mesh;
        out.rows.push_back({r["method"], r["dim"], r["nu"], r["kappa"], r["channel"], r["k"], r["lambda"],
                            r["residual"], r["analytic"], r["rel_error"]});
        records.push_back(std::move(r));
        lambdas.push_back(e.lambda);
        residuals.push_back(e.residual);
    }
    out.doc["command"] = "eigenvalues";
    out.doc["dim"] = cfg.dim;
    out.doc["potential"] = pot.is_coulomb() ? "coulomb" : "table";
    out.doc["nu"] = pot.nu;
    out.doc["k"] = cfg.k;
    out.doc["records"] = std::move(records);
    if (lambdas.size() == 2) {
        Json a;
        a["difference"] = std::abs(lambdas[0] - lambdas[1]);
        a["allowed"] = residuals[0] + residuals[1] + 1e-3;
        a["passed"] = std::abs(lambdas[0] - lambdas[1]) <= residuals[0] + residuals[1] + 1e-3;
        out.doc["agreement"] = std::move(a);
    }
    return out;
}

CommandOutput cmd_hardy_check(const RunConfig& cfg) {
    check_dim(cfg);
    if (!cfg.potential_table.empty()) fail(ErrorKind::Config, "hardy-check runs on the Coulomb potential only");
    const double nu = require_nu(cfg);
    if (nu > 1.0 / (4.0 - cfg.dim)) fail(ErrorKind::Config, "--nu must not exceed 1/(4-n)");
    if (cfg.samples < 0) fail(ErrorKind::Config, "--samples must be non-negative");
    HardyOptions o;
    o.profiles = cfg.samples;
    o.seed = cfg.seed;
    o.kappa_max = cfg.kappa_max.value_or(o.kappa_max);
    o.mesh.r_min = cfg.r_min;
    o.mesh.r_max = cfg.r_max;
    o.mesh.nodes = cfg.nodes;
    o.slack = cfg.slack.value_or(o.slack);
    o.threads = cfg.threads;
    const HardyReport rep = verify_corollary(cfg.dim, nu, o);

    CommandOutput out;
    out.header = {"index", "channel", "J", "scale", "ratio"};
    Json profiles = Json::array();
    for (std::size_t i = 0; i < rep.entries.size(); ++i) {
        const HardyEntry& e = rep.entries[i];
        Json p;
        p["index"] = i;
        p["channel"] = e.channel;
        p["J"] = e.J;
        p["scale"] = e.scale;
        p["ratio"] = e.J / e.scale;
        out.rows.push_back({p["index"], p["channel"], p["J"], p["scale"], p["ratio"]});
        profiles.push_back(std::move(p));
    }
    out.doc["command"] = "hardy-check";
    out.doc["dim"] = cfg.dim;
    out.doc["nu"] = nu;
    out.doc["lambda"] = rep.lambda;
    out.doc["seed"] = cfg.seed;
    out.doc["slack"] = o.slack;
    out.doc["profiles"] = std::move(profiles);
    out.doc["min_J"] = rep.min_J;
    out.doc["min_ratio"] = rep.min_ratio;
    out.doc["saturation"] = nullable(rep.saturation);
    out.doc["saturation_method"] = rep.saturation_method;
    out.doc["passed"] = rep.passed;
    out.exit_code = rep.passed ? 0 : 4;
    return out;
}

CommandOutput cmd_kernel_check(const RunConfig& cfg) {
    KernelCheckOptions o;
    o.p_min = cfg.p_min.value_or(o.p_min);
    o.p_max = cfg.p_max.value_or(o.p_max);
    o.cells = cfg.cells.value_or(o.cells);
    o.samples = cfg.samples;
    o.seed = cfg.seed;
    o.jmax = cfg.jmax;
    o.slack = cfg.slack.value_or(o.slack);
    if (!(o.p_min > 0.0 && o.p_max > o.p_min)) fail(ErrorKind::Config, "need 0 < p_min < p_max");
    const KernelCheckReport rep = kernel_check(o);

    CommandOutput out;
    out.header = {"kind", "name", "max_violation", "max_ratio", "sharpness", "passed"};
    auto dump = [&](const std::vector<InequalityCheck>& v, const char* kind, bool sharp) {
        Json a = Json::array();
        for (const auto& c : v) {
            Json e;
            e["name"] = c.name;
            e["max_violation"] = c.max_violation;
            e["max_ratio"] = c.max_ratio;
            if (sharp) e["sharpness"] = c.sharpness;
            e["passed"] = c.passed;
            out.rows.push_back({kind, e["name"], e["max_violation"], e["max_ratio"],
                                sharp ? e["sharpness"] : Json(nullptr), e["passed"]});
            a.push_back(std::move(e));
        }
        return a;
    };
    out.doc["command"] = "kernel-check";
    out.doc["seed"] = cfg.seed;
    out.doc["samples"] = o.samples;
    out.doc["mesh"] = {{"p_min", o.p_min}, {"p_max", o.p_max}, {"cells", o.cells}};
    out.doc["slack"] = o.slack;
    out.doc["chain"] = dump(rep.chain, "chain", false);
    out.doc["kato"] = dump(rep.kato, "kato", true);
    out.doc["passed"] = rep.passed;
    out.exit_code = rep.passed ? 0 : 4;
    return out;
}

CommandOutput cmd_core_check(const RunConfig& cfg) {
    check_dim(cfg);
    const double nu = require_nu(cfg);
    if (nu > 1.0 / (4.0 - cfg.dim)) fail(ErrorKind::Config, "--nu must not exceed 1/(4-n)");
    if (cfg.kmax < 1) fail(ErrorKind::Config, "--kmax must be positive");
    const CoreSequence seq = core_sequence(cfg.dim, nu, cfg.two_m, cfg.kmax);
    const double tol = 1e-8;
    CommandOutput out;
    out.header = {"k", "value", "q"};
    Json s = Json::array();
    double sup_v = -INFINITY, sup_q = -INFINITY;
    for (std::size_t i = 0; i < seq.values.size(); ++i) {
        Json e;
        e["k"] = i + 1;
        e["value"] = seq.values[i];
        e["q"] = seq.q[i];
        out.rows.push_back({e["k"], e["value"], e["q"]});
        s.push_back(std::move(e));
        sup_v = std::max(sup_v, seq.values[i]);
        sup_q = std::max(sup_q, seq.q[i]);
    }
    const bool passed = sup_v <= seq.bound + tol && sup_q <= seq.bound + tol;
    out.doc["command"] = "core-check";
    out.doc["dim"] = cfg.dim;
    out.doc["nu"] = nu;
    out.doc["two_m"] = cfg.two_m;
    out.doc["bound"] = seq.bound;
    out.doc["tolerance"] = tol;
    out.doc["sequence"] = std::move(s);
    out.doc["sup_value"] = sup_v;
    out.doc["sup_q"] = sup_q;
    out.doc["passed"] = passed;
    out.exit_code = passed ? 0 : 4;
    return out;
}

CommandOutput cmd_certificate(const RunConfig& cfg) {
    check_dim(cfg);
    CertificateCheckOptions o;
    o.p_min = cfg.p_min.value_or(o.p_min);
    o.p_max = cfg.p_max.value_or(o.p_max);
    o.cells = cfg.cells.value_or(o.cells);
    o.samples = cfg.samples;
    o.seed = cfg.seed;
    o.kappa_max = cfg.kappa_max.value_or(o.kappa_max);
    o.slack = cfg.slack.value_or(o.slack);
    if (!(o.p_min > 0.0 && o.p_max > o.p_min)) fail(ErrorKind::Config, "need 0 < p_min < p_max");
    const CertificateReport rep = certificate_check(cfg.dim, o);
    CommandOutput out;
    out.header = {"check", "value", "threshold", "passed"};
    out.rows = {{"talman_min_ratio", rep.min_ratio, -o.slack, rep.certificate_passed},
                {"relation_residual", rep.worst.residual, o.relation_tol, rep.worst.residual <= o.relation_tol},
                {"ratio_deviation", rep.worst.ratio_deviation, o.ratio_tol, rep.worst.ratio_deviation <= o.ratio_tol},
                {"orthogonality", rep.worst.orthogonality, nullptr, nullptr}};
    out.doc["command"] = "certificate";
    out.doc["dim"] = cfg.dim;
    out.doc["seed"] = cfg.seed;
    out.doc["samples"] = o.samples;
    out.doc["mesh"] = {{"p_min", o.p_min}, {"p_max", o.p_max}, {"cells", o.cells}};
    out.doc["talman"] = {{"min_ratio", rep.min_ratio}, {"slack", o.slack}, {"passed", rep.certificate_passed}};
    out.doc["relation"] = {{"residual", rep.worst.residual},
                           {"ratio_deviation", rep.worst.ratio_deviation},
                           {"orthogonality", rep.worst.orthogonality},
                           {"passed", rep.relation_passed}};
    out.doc["passed"] = rep.certificate_passed && rep.relation_passed;
    out.exit_code = rep.certificate_passed && rep.relation_passed ? 0 : 4;
    return out;
}

CommandOutput cmd_sweep(const RunConfig& cfg) {
    check_dim(cfg);
    check_method(cfg.method);
    if (!cfg.potential_table.empty()) fail(ErrorKind::Config, "sweep runs on the Coulomb potential only");
    CommandOutput out;
    out.header = {"nu", "lambda_num", "lambda_analytic", "rel_error"};
    if (cfg.timing) out.header.push_back("runtime_ms");
    for (const char* h : {"method", "status", "flagged"}) out.header.push_back(h);
    Json rows = Json::array();
    const double crit = 1.0 / (4.0 - cfg.dim);
    for (double nu : cfg.nus) {
        for (const std::string& m : methods_of(cfg.method)) {
            Json r;
            r["nu"] = nu;
            r["lambda_num"] = nullptr;
            r["lambda_analytic"] = nu >= 0.0 && nu <= crit ? Json(ground_analytic(cfg.dim, nu)) : Json(nullptr);
            r["rel_error"] = nullptr;
            const auto t0 = std::chrono::steady_clock::now();
            int status = 0;
            std::string message;
            try {
                if (!(nu >= 0.0)) fail(ErrorKind::Config, "nu must be non-negative");
                const PotentialSpec pot = PotentialSpec::coulomb(nu);
                const GapSpectrumResult res = m == "talman" ? talman_eigenvalue(1, cfg.dim, pot, talman_options(cfg))
                                                            : esteban_sere_eigenvalue(1, cfg.dim, pot, es_options(cfg));
                const double l = res.kth(1).lambda, a = ground_analytic(cfg.dim, nu);
                r["lambda_num"] = l;
                r["rel_error"] = std::abs(l - a) / a;
            } catch (const Error& e) {
                status = exit_code_for(e.kind());
                message = e.what();
            }
            const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            if (cfg.timing) r["runtime_ms"] = ms;
            r["method"] = m;
            r["status"] = status;
            const bool near = (4.0 - cfg.dim) * nu >= 0.99;
            const bool loose = r["rel_error"].is_number() && r["rel_error"].get<double>() > 1e-4;
            r["flagged"] = near || loose;
            if (!message.empty()) r["message"] = message;
            std::vector<Json> row;
            for (const auto& h : out.header) row.push_back(r[h]);
            out.rows.push_back(std::move(row));
            rows.push_back(std::move(r));
        }
    }
    out.doc["command"] = "sweep";
    out.doc["dim"] = cfg.dim;
    out.doc["method"] = cfg.method;
    out.doc["rows"] = std::move(rows);
    return out;
}

namespace {

std::string csv_cell(const Json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    return v.dump();
}

}  // namespace

std::string render(const CommandOutput& out, const std::string& format) {
    if (format == "json") return out.doc.dump(2) + "\n";
    if (format != "csv") fail(ErrorKind::Config, "--format must be json or csv");
    std::ostringstream os;
    for (std::size_t i = 0; i < out.header.size(); ++i) os << (i ? "," : "") << out.header[i];
    os << "\n";
    for (const auto& row : out.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
        os << "\n";
    }
    return os.str();
}

namespace {

// Options bound to a scratch config; only those given on the command line are copied over.
class Overlay {
public:
    explicit Overlay(RunConfig& scratch) : s_(scratch) {}

    template <class T>
    CLI::Option* add(CLI::App* app, const std::string& name, T RunConfig::*member, const std::string& help) {
        CLI::Option* o = app->add_option(name, s_.*member, help);
        ops_.push_back({o, [this, member](RunConfig& c) { c.*member = s_.*member; }});
        return o;
    }

    template <class T>
    CLI::Option* add(CLI::App* app, const std::string& name, std::optional<T> RunConfig::*member,
                     const std::string& help) {
        auto store = std::make_shared<T>();
        CLI::Option* o = app->add_option(name, *store, help);
        ops_.push_back({o, [store, member](RunConfig& c) { c.*member = *store; }});
        return o;
    }

    CLI::Option* flag(CLI::App* app, const std::string& name, bool RunConfig::*member, bool value,
                      const std::string& help) {
        CLI::Option* o = app->add_flag(name, help);
        ops_.push_back({o, [member, value](RunConfig& c) { c.*member = value; }});
        return o;
    }

    void apply(RunConfig& c) const {
        for (const auto& [opt, fn] : ops_)
            if (opt->count() > 0) fn(c);
    }

private:
    RunConfig& s_;
    std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> ops_;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectral gap eigenvalues and inequality checks for Dirac-Coulomb operators"};
    app.require_subcommand(1);
    RunConfig scratch;
    Overlay ov(scratch);
    std::string config_path;

    auto common = [&](CLI::App* s) {
        s->add_option("--config", config_path, "JSON config file; flags override its values");
        ov.add(s, "--format", &RunConfig::format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        ov.add(s, "--output,-o", &RunConfig::output, "output file (default stdout)");
        ov.add(s, "--threads", &RunConfig::threads, "worker threads (0: DIRACGAP_THREADS or hardware)");
    };
    auto physics = [&](CLI::App* s) {
        ov.add(s, "--dim", &RunConfig::dim, "space dimension, 2 or 3");
        ov.add(s, "--nu", &RunConfig::nu, "Coulomb coupling");
    };
    auto radial = [&](CLI::App* s) {
        ov.add(s, "--nodes,-N", &RunConfig::nodes, "radial mesh nodes");
        ov.add(s, "--r-min", &RunConfig::r_min, "radial mesh start");
        ov.add(s, "--r-max", &RunConfig::r_max, "radial cutoff (0: automatic)");
    };
    auto momentum = [&](CLI::App* s) {
        ov.add(s, "--p-min", &RunConfig::p_min, "momentum mesh start");
        ov.add(s, "--p-max", &RunConfig::p_max, "momentum mesh end");
        ov.add(s, "--cells,-M", &RunConfig::cells, "momentum cells");
    };
    auto random = [&](CLI::App* s) {
        ov.add(s, "--seed", &RunConfig::seed, "64-bit seed of the random suite");
        ov.add(s, "--samples", &RunConfig::samples, "random vectors or profiles");
        ov.add(s, "--slack", &RunConfig::slack, "relative slack of the inequality");
    };
    auto solver = [&](CLI::App* s) {
        ov.add(s, "--method", &RunConfig::method, "talman, esteban-sere or both");
        ov.add(s, "--kappa-max", &RunConfig::kappa_max, "largest |kappa| included");
        ov.add(s, "--tol", &RunConfig::tol, "bisection tolerance");
        ov.flag(s, "--no-enrich", &RunConfig::enrich, false, "disable the singular enrichment function");
        radial(s);
        momentum(s);
    };

    CLI::App* eig = app.add_subcommand("eigenvalues", "k-th eigenvalue in the gap (-1, 1)");
    common(eig);
    physics(eig);
    solver(eig);
    ov.add(eig, "--k", &RunConfig::k, "which eigenvalue, counted with multiplicity");
    ov.add(eig, "--potential-table", &RunConfig::potential_table, "tabulated potential \"r v\"; --nu bounds it");

    CLI::App* hardy = app.add_subcommand("hardy-check", "Hardy-Dirac inequality on random profiles");
    common(hardy);
    physics(hardy);
    radial(hardy);
    random(hardy);
    ov.add(hardy, "--kappa-max", &RunConfig::kappa_max, "largest |kappa| sampled");

    CLI::App* kern = app.add_subcommand("kernel-check", "Coulomb form chain and Kato bounds");
    common(kern);
    momentum(kern);
    random(kern);
    ov.add(kern, "--jmax", &RunConfig::jmax, "largest j of the chain");

    CLI::App* core = app.add_subcommand("core-check", "boundedness of q on the cutoff sequence");
    common(core);
    physics(core);
    ov.add(core, "--kmax", &RunConfig::kmax, "sequence length");
    ov.add(core, "--two-m", &RunConfig::two_m, "2m of the channel");

    CLI::App* cert = app.add_subcommand("certificate", "momentum-space certificate and relation check");
    common(cert);
    ov.add(cert, "--dim", &RunConfig::dim, "space dimension, 2 or 3");
    momentum(cert);
    random(cert);
    ov.add(cert, "--kappa-max", &RunConfig::kappa_max, "largest |kappa| sampled");

    CLI::App* sweep = app.add_subcommand("sweep", "ground eigenvalue against nu");
    common(sweep);
    ov.add(sweep, "--dim", &RunConfig::dim, "space dimension, 2 or 3");
    solver(sweep);
    ov.add(sweep, "--nus", &RunConfig::nus, "coupling values")->delimiter(',');
    ov.flag(sweep, "--timing", &RunConfig::timing, true, "add the runtime_ms column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config_file(config_path, cfg);
        ov.apply(cfg);
        if (cfg.format != "json" && cfg.format != "csv") fail(ErrorKind::Config, "format must be json or csv");
        CommandOutput res;
        if (eig->parsed())
            res = cmd_eigenvalues(cfg);
        else if (hardy->parsed())
            res = cmd_hardy_check(cfg);
        else if (kern->parsed())
            res = cmd_kernel_check(cfg);
        else if (core->parsed())
            res = cmd_core_check(cfg);
        else if (cert->parsed())
            res = cmd_certificate(cfg);
        else
            res = cmd_sweep(cfg);
        const std::string text = render(res, cfg.format);
        if (cfg.output.empty()) {
            out << text;
        } else {
            std::ofstream f(cfg.output, std::ios::binary);
            if (!f) fail(ErrorKind::Config, "cannot write " + cfg.output);
            f << text;
        }
        return res.exit_code;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace diracgap::cli

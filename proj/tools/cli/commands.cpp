#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "lindyn/csv.hpp"

namespace lindyn::cli {

namespace fs = std::filesystem;
using io::ConfigError;
using io::field;
using io::get_double;
using io::get_int;
using io::has;
using io::join;

namespace {

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

// Parse-phase guard: library precondition failures while building inputs are input errors.
template <class F>
auto parsing(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    } catch (const std::out_of_range& e) {
        throw ConfigError(path, e.what());
    } catch (const json::exception& e) {
        throw ConfigError(path, e.what());
    }
}

double positive(const json& b, const std::string& key, const std::string& path, std::optional<double> fallback = {}) {
    const double v = fallback && !has(b, key) ? *fallback : get_double(b, key, path);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(join(path, key), "must be positive and finite");
    return v;
}

std::int64_t positive_int(const json& b, const std::string& key, const std::string& path, std::int64_t fallback) {
    const auto v = get_int(b, key, path, fallback);
    if (v < 1) throw ConfigError(join(path, key), "must be a positive integer");
    return v;
}

std::vector<int> n_sequence(const json& b, const std::string& path, int default_k_max) {
    std::vector<int> n;
    if (has(b, "n")) {
        const json& a = b.at("n");
        if (!a.is_array() || a.empty()) throw ConfigError(join(path, "n"), "expected a nonempty integer array");
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!a[i].is_number_integer() || a[i].get<std::int64_t>() < 1)
                throw ConfigError(join(join(path, "n"), i), "expected a positive integer");
            n.push_back(a[i].get<int>());
            if (i > 0 && n[i] <= n[i - 1]) throw ConfigError(join(join(path, "n"), i), "sequence must be strictly increasing");
        }
        return n;
    }
    const auto k_max = positive_int(b, "k_max", path, default_k_max);
    if (k_max > 100000) throw ConfigError(join(path, "k_max"), "must not exceed 100000");
    for (int k = 1; k <= k_max; ++k) n.push_back(k);
    return n;
}

json envelope(const std::string& command, std::uint64_t seed, const json& block, json result, const std::string& verdict) {
    return json{{"schema", io::kReportSchema}, {"command", command}, {"seed", seed},
                {"input", block},             {"result", std::move(result)}, {"verdict", verdict}};
}

// ---------------------------------------------------------------------------

Artifacts cmd_universality(const json& b, std::uint64_t seed) {
    const std::string P = "universality";
    const auto dom = io::domain_from_json(field(b, "domain", P), join(P, "domain"));
    const auto depth = positive_int(b, "depth", P, 8);
    const auto n_max = positive_int(b, "n_max", P, 1000);
    const double margin = positive(b, "margin", P, maps::kDefaultMargin);
    auto phi = io::map_from_json(field(b, "map", P), join(P, "map"));
    phi = parsing(join(P, "map"), [&] { return phi.attached_to(dom, static_cast<int>(std::min<std::int64_t>(depth, 8))); });
    std::vector<holo::CompactSet> compacts;
    if (has(b, "compacts")) {
        const std::string cp = join(P, "compacts");
        const json& a = field(b, "compacts", P);
        if (!a.is_array() || a.empty()) throw ConfigError(cp, "expected a nonempty array");
        for (std::size_t i = 0; i < a.size(); ++i) {
            compacts.push_back(io::compact_from_json(a[i], join(cp, i)));
            if (!dom.contains(compacts.back(), 0.0)) throw ConfigError(join(cp, i), "not inside the domain");
        }
    } else {
        compacts = parsing(join(P, "depth"), [&] {
            std::vector<holo::CompactSet> ks;
            for (int n = 1; n <= depth; ++n) ks.push_back(dom.exhaustion(n));
            return ks;
        });
    }

    std::vector<maps::RunawayCertificate> certs;
    std::optional<int> failed;
    for (std::size_t i = 0; i < compacts.size() && !failed; ++i) {
        try {
            certs.push_back(maps::universality_certificate(phi, std::vector<holo::CompactSet>{compacts[i]}, n_max, margin).front());
        } catch (const maps::ExhaustedSearch&) {
            failed = static_cast<int>(i) + 1;
        }
    }
    json cj = json::array();
    for (const auto& c : certs) cj.push_back(io::to_json(c));
    json result{{"certificates", cj}, {"complete", !failed}, {"map", io::to_json(phi)}, {"n_max", n_max}};
    if (failed) result["failure"] = json{{"compact", *failed}, {"reason", "no run-away index up to n_max"}};

    Artifacts a;
    a.exit_code = failed ? kFail : kOk;
    a.report = envelope("universality", seed, b, result, failed ? "fail" : "pass");
    a.files.emplace_back("universality.csv", io::csv_table(certs).str());
    std::ostringstream s;
    s << "universality: " << certs.size() << "/" << compacts.size() << " compacts certified";
    if (failed) s << "; no run-away index for compact " << *failed << " up to n = " << n_max;
    s << "\n";
    for (std::size_t i = 0; i < certs.size(); ++i)
        s << "  K" << i + 1 << ": witness n = " << certs[i].witness_n << ", separation " << fmt("%.6g", certs[i].separation)
          << "\n";
    a.summary = s.str();
    return a;
}

// ---------------------------------------------------------------------------

Artifacts cmd_luh_build(const json& b, std::uint64_t seed) {
    const std::string P = "luh-build";
    const auto task = io::luh_task_from_json(b, P);
    const auto stages = positive_int(b, "stages", P, 8);
    const auto budget = positive_int(b, "stage_budget", P, 100);

    const auto chain = luh::make_disk_chain(task.domain, static_cast<int>(stages), task.params.r_scale);
    const auto run = luh::run_luh(task, chain, static_cast<int>(budget));

    json records = json::array(), placements = json::array();
    for (const auto& r : run.state.records) records.push_back(io::to_json(r));
    for (const auto& p : run.state.placements)
        placements.push_back(json{{"stage", p.stage}, {"target", p.target}, {"order", p.order}, {"index", p.index}});
    const bool complete = run.certificate.complete();
    json result{{"task", io::to_json(task)},           {"schedule", io::to_json(chain)},
                {"certificate", io::to_json(run.certificate)}, {"stages", records},
                {"placements", placements},             {"h", io::to_json(run.h)},
                {"h_degree", run.h.degree()},           {"complete", complete}};

    Artifacts a;
    a.exit_code = complete ? kOk : kFail;
    a.report = envelope("luh-build", seed, b, result, complete ? "pass" : "fail");
    a.files.emplace_back("luh-build.csv", io::csv_table(run.certificate).str());
    double worst = 0.0, drift = 0.0;
    int met = 0;
    for (const auto& e : run.certificate.entries) {
        met += e.met;
        if (e.covered) worst = std::max(worst, e.error);
        if (e.dense_error && e.error > 0.0) drift = std::max(drift, std::abs(*e.dense_error - e.error) / e.error);
    }
    std::ostringstream s;
    s << "luh-build: " << met << "/" << run.certificate.entries.size() << " requirements met in "
      << run.certificate.stages_run << " stages; worst error " << fmt("%.3g", worst) << ", dense drift "
      << fmt("%.2g", 100.0 * drift) << "%, deg h = " << run.h.degree() << "\n";
    for (const auto& r : run.state.records)
        s << "  stage " << r.stage << ": degree " << r.degree << ", sup on K'' " << fmt("%.3g", r.correction_sup)
          << " (bound " << fmt("%.3g", r.bound) << ")\n";
    a.summary = s.str();
    return a;
}

// ---------------------------------------------------------------------------

Artifacts cmd_orbit_probe(const json& b, std::uint64_t seed) {
    const std::string P = "orbit-probe";
    const auto f = io::poly_from_json(field(b, "f", P), join(P, "f"));
    const auto g = io::poly_from_json(field(b, "g", P), join(P, "g"));
    const auto phi = io::map_from_json(field(b, "map", P), join(P, "map"));
    const auto K = io::compact_from_json(field(b, "compact", P), join(P, "compact"));
    const double eps = positive(b, "eps", P);
    const auto n_max = positive_int(b, "n_max", P, 100);
    const bool projective = io::get_bool(b, "projective", P, false);

    const auto r = maps::orbit_probe(holo::as_evaluable(f), phi, holo::as_evaluable(g), K, eps, n_max, projective);
    Artifacts a;
    a.exit_code = r.hit ? kOk : kFail;
    a.report = envelope("orbit-probe", seed, b, io::to_json(r), r.hit ? "hit" : "miss");
    io::CsvTable t;
    t.header = {"hit", "n", "error", "lambda_re", "lambda_im"};
    t.rows.push_back({r.hit ? "true" : "false", std::to_string(r.n), io::csv_number(r.error),
                      io::csv_number(r.lambda.real()), io::csv_number(r.lambda.imag())});
    a.files.emplace_back("orbit-probe.csv", t.str());
    a.summary = std::string("orbit-probe: ") + (r.hit ? "hit" : "miss") + " at n = " + std::to_string(r.n) +
                ", error " + fmt("%.6g", r.error) + "\n";
    return a;
}

// ---------------------------------------------------------------------------

Artifacts cmd_dense_approx(const json& b, std::uint64_t seed, const std::string& base_dir) {
    const std::string P = "dense-approx";
    const auto dom = io::domain_from_json(field(b, "domain", P), join(P, "domain"));
    const auto N = positive_int(b, "N", P, holo::kDefaultFrechetTerms);
    if (N > 60) throw ConfigError(join(P, "N"), "must not exceed 60");

    holo::ComplexPoly f0;
    const json& fj = field(b, "f0", P);
    if (fj.is_object() && has(fj, "report")) {
        const std::string rp = join(join(P, "f0"), "report");
        fs::path path = io::get_string(fj, "report", join(P, "f0"));
        if (path.is_relative()) path = fs::path(base_dir) / path;
        std::ifstream is(path);
        if (!is) throw ConfigError(rp, "cannot read " + path.string());
        json rep;
        try {
            rep = json::parse(is);
        } catch (const json::parse_error& e) {
            throw ConfigError(rp, std::string("malformed report: ") + e.what());
        }
        f0 = io::poly_from_json(field(field(rep, "result", rp), "h", rp + ".result"), rp + ".result.h");
    } else {
        f0 = io::poly_from_json(fj, join(P, "f0"));
    }

    struct Case {
        holo::ComplexPoly g;
        double eps;
    };
    std::vector<Case> cases;
    if (has(b, "g")) {
        cases.push_back({io::poly_from_json(b.at("g"), join(P, "g")), positive(b, "eps", P)});
    } else {
        const std::string rp = join(P, "random");
        const json& r = field(b, "random", P);
        const auto count = positive_int(r, "count", rp, 20);
        const auto max_degree = get_int(r, "max_degree", rp, 4);
        if (max_degree < 0 || max_degree > 20) throw ConfigError(join(rp, "max_degree"), "must lie in [0, 20]");
        const double scale = positive(r, "coeff_scale", rp, 1.0);
        const double eps_min = positive(r, "eps_min", rp, 0.01), eps_max = positive(r, "eps_max", rp, 0.5);
        if (!(eps_min <= eps_max)) throw ConfigError(join(rp, "eps_max"), "must not be below eps_min");
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0), ue(std::log(eps_min), std::log(eps_max));
        std::uniform_int_distribution<std::int64_t> ud(0, max_degree);
        for (std::int64_t i = 0; i < count; ++i) {
            std::vector<cplx> c(static_cast<std::size_t>(ud(rng)) + 1);
            for (auto& x : c) x = scale * cplx{u(rng), u(rng)};
            cases.push_back({holo::ComplexPoly(std::move(c)), std::exp(ue(rng))});
        }
    }

    json rows = json::array();
    io::CsvTable t;
    t.header = {"case", "eps", "delta", "d_delta_f0", "d_f_g", "ok"};
    int ok = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto d = luh::dense_approx(f0, cases[i].g, dom, cases[i].eps, static_cast<int>(N));
        const bool good = d.d_f_g < cases[i].eps;
        ok += good;
        rows.push_back(json{{"g", io::to_json(cases[i].g)},
                            {"eps", cases[i].eps},
                            {"delta", io::real_to_json(d.delta)},
                            {"d_delta_f0", io::real_to_json(d.d_delta_f0)},
                            {"d_f_g", io::real_to_json(d.d_f_g)},
                            {"truncation_bound", d.truncation_bound},
                            {"ok", good}});
        t.rows.push_back({std::to_string(i + 1), io::csv_number(cases[i].eps), io::csv_number(d.delta),
                          io::csv_number(d.d_delta_f0), io::csv_number(d.d_f_g), good ? "true" : "false"});
    }
    const bool all = ok == static_cast<int>(cases.size());
    Artifacts a;
    a.exit_code = all ? kOk : kFail;
    a.report = envelope("dense-approx", seed, b, json{{"cases", rows}, {"f0_degree", f0.degree()}}, all ? "pass" : "fail");
    a.files.emplace_back("dense-approx.csv", t.str());
    a.summary = "dense-approx: " + std::to_string(ok) + "/" + std::to_string(cases.size()) + " cases with d(f, g) < eps\n";
    return a;
}

// ---------------------------------------------------------------------------

int cells_per_unit(const json& b, const std::string& P) {
    const auto m = positive_int(b, "cells_per_unit", P, cosine::kDefaultCellsPerUnit);
    if (m > 4096) throw ConfigError(join(P, "cells_per_unit"), "must not exceed 4096");
    return static_cast<int>(m);
}

cosine::GridInterval interval(const json& b, const std::string& key, const std::string& P, std::pair<double, double> fallback) {
    if (!has(b, key)) return {fallback.first, fallback.second};
    const json& a = b.at(key);
    if (!a.is_array() || a.size() != 2) throw ConfigError(join(P, key), "expected [a, b]");
    const double lo = io::real_from_json(a[0], join(join(P, key), 0)), hi = io::real_from_json(a[1], join(join(P, key), 1));
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError(join(P, key), "expected a < b");
    return {lo, hi};
}

std::string condition_summary(const cosine::ConditionReport& r) {
    std::ostringstream s;
    s << "cosine-check: " << (r.pass ? "pass" : "conditions not met") << " (tau " << fmt("%.3g", r.tau) << ", k = 1.."
      << r.k.size() << ")\n";
    for (int i = 0; i < cosine::kConditionSequences; ++i) {
        const auto u = static_cast<std::size_t>(i);
        s << "  " << cosine::ConditionReport::names()[u] << ": final " << fmt("%.4g", r.seq[u].back()) << " "
          << (r.seq_pass[u] ? "pass" : "fail") << "\n";
    }
    return s.str();
}

std::string demo_summary(const cosine::DemoReport& r) {
    std::ostringstream s;
    s << "cosine-demo: " << (r.hit ? "hit at k0 = " + std::to_string(*r.k0) : std::string("miss"));
    if (r.best) s << "; a = " << fmt("%.4g", r.best->a) << ", b = " << fmt("%.4g", r.best->b) << ", lambda = " << fmt("%.4g", r.best->lambda);
    s << " (" << r.rows.size() << " rows, " << r.skipped.size() << " degenerate)\n";
    return s.str();
}

Artifacts cmd_cosine_check(const json& b, std::uint64_t seed) {
    const std::string P = "cosine-check";
    const int m = cells_per_unit(b, P);
    const auto w = io::weight_from_json(field(b, "weight", P), join(P, "weight"));
    const auto K = interval(b, "K", P, {-5.0, 5.0});
    const auto scheme = io::partition_scheme_from_json(has(b, "scheme") ? b.at("scheme") : json("whole"), join(P, "scheme"));
    const auto n = n_sequence(b, P, 50);
    const auto norm = io::norm_spec_from_json(has(b, "norm") ? b.at("norm") : json("L1"), join(P, "norm"));
    const double tau = positive(b, "tau", P, 1e-6);
    // Validate the scheme on K once so set errors are reported as input errors.
    parsing(join(P, "scheme"), [&] { return scheme.at(1, n.front(), K.cells(m), w, m); });

    const auto rep = cosine::check_conditions(w, K, scheme, n, norm, tau, m);
    Artifacts a;
    a.exit_code = rep.pass ? kOk : kFail;
    a.report = envelope("cosine-check", seed, b, io::to_json(rep), rep.pass ? "pass" : "conditions not met");
    a.files.emplace_back("cosine-check.csv", io::csv_table(rep).str());
    a.summary = condition_summary(rep);
    return a;
}

Artifacts cmd_cosine_demo(const json& b, std::uint64_t seed) {
    const std::string P = "cosine-demo";
    const int m = cells_per_unit(b, P);
    const auto w = io::weight_from_json(field(b, "weight", P), join(P, "weight"));
    const auto f = io::grid_function_from_json(field(b, "f", P), join(P, "f"), m);
    const auto g = io::grid_function_from_json(field(b, "g", P), join(P, "g"), m);
    if (f.support().empty()) throw ConfigError(join(P, "f"), "must be nonzero");
    if (g.support().empty()) throw ConfigError(join(P, "g"), "must be nonzero");
    const auto scheme = io::partition_scheme_from_json(has(b, "scheme") ? b.at("scheme") : json("whole"), join(P, "scheme"));
    const auto n = n_sequence(b, P, 60);
    const auto norm = io::norm_spec_from_json(has(b, "norm") ? b.at("norm") : json("L1"), join(P, "norm"));
    const double tol = positive(b, "tol", P, 1e-3);

    const auto rep = cosine::supercyclicity_demo(f, g, w, scheme, n, norm, tol);
    Artifacts a;
    a.exit_code = rep.hit ? kOk : kFail;
    a.report = envelope("cosine-demo", seed, b, io::to_json(rep), rep.hit ? "hit" : "miss");
    a.files.emplace_back("cosine-demo.csv", io::csv_table(rep).str());
    a.summary = demo_summary(rep);
    return a;
}

Artifacts cmd_worked_example(const json& b, std::uint64_t seed) {
    const std::string P = "example-5-7";
    const int m = cells_per_unit(b, P);
    const double M = get_double(b, "M", P, 4.0), delta = get_double(b, "delta", P, 1.0);
    const auto w = parsing(P, [&] { return cosine::example_weight(M, delta); });
    const auto K = interval(b, "K", P, {-5.0, 5.0});
    const auto n = n_sequence(b, P, 50);
    const auto norm = io::norm_spec_from_json(has(b, "norm") ? b.at("norm") : json("L1"), join(P, "norm"));
    const double tau = positive(b, "tau", P, 1e-6);
    const json demo = has(b, "demo") ? b.at("demo") : json::object();
    const std::string D = join(P, "demo");
    if (!demo.is_object()) throw ConfigError(D, "expected an object");
    const auto f = io::grid_function_from_json(has(demo, "f") ? demo.at("f") : json{{"indicator", {0.0, 1.0}}}, join(D, "f"), m);
    const auto g = io::grid_function_from_json(has(demo, "g") ? demo.at("g") : json{{"indicator", {0.0, 1.0}}}, join(D, "g"), m);
    if (f.support().empty()) throw ConfigError(join(D, "f"), "must be nonzero");
    if (g.support().empty()) throw ConfigError(join(D, "g"), "must be nonzero");
    const auto dn = n_sequence(demo, D, 60);
    const double tol = positive(demo, "tol", D, 1e-3);

    const auto scheme = cosine::PartitionScheme::whole();
    const auto check = cosine::check_conditions(w, K, scheme, n, norm, tau, m);
    const auto rep = cosine::supercyclicity_demo(f, g, w, scheme, dn, norm, tol);
    const bool ok = check.pass && rep.hit;
    Artifacts a;
    a.exit_code = ok ? kOk : kFail;
    a.report = envelope("example-5-7", seed, b,
                        json{{"weight", io::to_json(w)}, {"check", io::to_json(check)}, {"demo", io::to_json(rep)}},
                        ok ? "pass" : "fail");
    a.files.emplace_back("example-5-7-check.csv", io::csv_table(check).str());
    a.files.emplace_back("example-5-7-demo.csv", io::csv_table(rep).str());
    a.summary = "example-5-7 (M = " + fmt("%g", M) + ", delta = " + fmt("%g", delta) + ")\n" + condition_summary(check) +
                demo_summary(rep);
    return a;
}

}  // namespace

Artifacts execute(const std::string& command, const json& block, std::uint64_t seed, const std::string& base_dir) {
    if (!block.is_object()) throw ConfigError(command, "expected an object");
    if (command == "universality") return cmd_universality(block, seed);
    if (command == "luh-build") return cmd_luh_build(block, seed);
    if (command == "orbit-probe") return cmd_orbit_probe(block, seed);
    if (command == "dense-approx") return cmd_dense_approx(block, seed, base_dir);
    if (command == "cosine-check") return cmd_cosine_check(block, seed);
    if (command == "cosine-demo") return cmd_cosine_demo(block, seed);
    if (command == "example-5-7") return cmd_worked_example(block, seed);
    throw ConfigError("command", "unknown command '" + command + "'");
}

int run(const Options& opts, std::ostream& out, std::ostream& err) {
    json config;
    std::string command;
    std::uint64_t seed = 0;
    json block;
    fs::path base_dir = ".";
    try {
        if (opts.config_path.empty()) {
            if (opts.command.empty()) throw ConfigError("--config", "a config file or a command is required");
            config = json::object();
        } else {
            std::ifstream is(opts.config_path);
            if (!is) throw ConfigError("--config", "cannot read " + opts.config_path);
            try {
                config = json::parse(is);
            } catch (const json::parse_error& e) {
                throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
            }
            if (!config.is_object()) throw ConfigError("<root>", "expected an object");
            base_dir = fs::path(opts.config_path).parent_path();
            if (base_dir.empty()) base_dir = ".";
        }
        if (has(config, "schema") && io::get_string(config, "schema", "") != io::kConfigSchema)
            throw ConfigError("schema", std::string("unsupported schema, expected ") + io::kConfigSchema);
        const std::string named = io::get_string(config, "command", "", "");
        if (!opts.command.empty() && !named.empty() && named != opts.command)
            throw ConfigError("command", "config is for '" + named + "' but '" + opts.command + "' was requested");
        command = opts.command.empty() ? named : opts.command;
        if (command.empty()) throw ConfigError("command", "no command given on the command line or in the config");
        const auto& names = command_names();
        if (std::find(names.begin(), names.end(), command) == names.end())
            throw ConfigError("command", "unknown command '" + command + "'");
        seed = opts.seed ? *opts.seed : static_cast<std::uint64_t>(io::get_int(config, "seed", "", 0));
        if (has(config, command)) {
            block = config.at(command);
        } else {
            block = config;
            for (const char* meta : {"schema", "command", "seed"}) block.erase(meta);
        }
    } catch (const ConfigError& e) {
        err << "lindyn: input error at " << e.what() << "\n";
        return kInputError;
    }

    Artifacts art;
    try {
        art = execute(command, block, seed, base_dir.string());
    } catch (const ConfigError& e) {
        err << "lindyn: input error at " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "lindyn: " << command << " failed: " << e.what() << "\n";
        return kFail;
    }

    try {
        const fs::path dir = opts.out_dir.empty() ? fs::path(".") : fs::path(opts.out_dir);
        fs::create_directories(dir);
        io::write_text((dir / (command + ".json")).string(), io::dump(art.report));
        for (const auto& [name, text] : art.files) io::write_text((dir / name).string(), text);
    } catch (const std::exception& e) {
        err << "lindyn: " << e.what() << "\n";
        return kFail;
    }
    if (!opts.quiet) out << art.summary;
    return art.exit_code;
}

}  // namespace lindyn::cli

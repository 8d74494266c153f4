#include "lindyn/serialize.hpp"

#include <cmath>
#include <limits>

namespace lindyn::io {

using holo::ChebyshevBasis;
using holo::CompactSet;
using holo::ComplexPoly;
using holo::PlanarDomain;
using holo::PowerBasis;

// ---------------------------------------------------------------------------
// Field access

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string join(const std::string& path, std::size_t index) { return path + "[" + std::to_string(index) + "]"; }

bool has(const json& obj, const std::string& key) { return obj.is_object() && obj.contains(key); }

const json& field(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(join(path, key), "missing field");
    return *it;
}

double real_from_json(const json& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw ConfigError(path, "expected a number");
}

json real_to_json(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

double get_double(const json& obj, const std::string& key, const std::string& path) {
    return real_from_json(field(obj, key, path), join(path, key));
}

double get_double(const json& obj, const std::string& key, const std::string& path, double fallback) {
    return has(obj, key) ? get_double(obj, key, path) : fallback;
}

std::int64_t get_int(const json& obj, const std::string& key, const std::string& path) {
    const json& j = field(obj, key, path);
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number_float()) {
        const double d = j.get<double>();
        if (d == std::floor(d) && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
    }
    throw ConfigError(join(path, key), "expected an integer");
}

std::int64_t get_int(const json& obj, const std::string& key, const std::string& path, std::int64_t fallback) {
    return has(obj, key) ? get_int(obj, key, path) : fallback;
}

bool get_bool(const json& obj, const std::string& key, const std::string& path, bool fallback) {
    if (!has(obj, key)) return fallback;
    const json& j = obj.at(key);
    if (!j.is_boolean()) throw ConfigError(join(path, key), "expected a boolean");
    return j.get<bool>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& path) {
    const json& j = field(obj, key, path);
    if (!j.is_string()) throw ConfigError(join(path, key), "expected a string");
    return j.get<std::string>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& path, const std::string& fallback) {
    return has(obj, key) ? get_string(obj, key, path) : fallback;
}

namespace {

const json& need_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError(path, "expected an array");
    return j;
}

std::vector<double> reals_from_json(const json& j, const std::string& path) {
    std::vector<double> out;
    for (std::size_t i = 0; i < need_array(j, path).size(); ++i) out.push_back(real_from_json(j[i], join(path, i)));
    return out;
}

json reals_to_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(real_to_json(x));
    return a;
}

json complexes_to_json(const std::vector<cplx>& v) {
    json a = json::array();
    for (auto z : v) a.push_back(to_json(z));
    return a;
}

std::vector<cplx> complexes_from_json(const json& j, const std::string& path) {
    std::vector<cplx> out;
    for (std::size_t i = 0; i < need_array(j, path).size(); ++i) out.push_back(complex_from_json(j[i], join(path, i)));
    return out;
}

template <class F>
auto wrap(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    } catch (const std::out_of_range& e) {
        throw ConfigError(path, e.what());
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// holo

json to_json(cplx z) { return json::array({real_to_json(z.real()), real_to_json(z.imag())}); }

cplx complex_from_json(const json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {real_from_json(j[0], join(path, 0)), real_from_json(j[1], join(path, 1))};
    throw ConfigError(path, "expected a number or a [re, im] pair");
}

json to_json(const ComplexPoly& p) {
    if (p.is_standard()) return complexes_to_json(p.coeffs());
    json j;
    if (const auto* pb = std::get_if<PowerBasis>(&p.basis())) {
        j["basis"] = "power";
        j["center"] = to_json(pb->center);
        j["scale"] = to_json(pb->scale);
    } else {
        const auto& cb = std::get<ChebyshevBasis>(p.basis());
        j["basis"] = "chebyshev";
        j["segment"] = json::array({to_json(cb.a), to_json(cb.b)});
    }
    j["coeffs"] = complexes_to_json(p.coeffs());
    return j;
}

ComplexPoly poly_from_json(const json& j, const std::string& path) {
    if (j.is_array()) return ComplexPoly(complexes_from_json(j, path));
    const auto basis = get_string(j, "basis", path);
    auto coeffs = complexes_from_json(field(j, "coeffs", path), join(path, "coeffs"));
    return wrap(path, [&] {
        if (basis == "power")
            return ComplexPoly(std::move(coeffs), PowerBasis{complex_from_json(field(j, "center", path), join(path, "center")),
                                                             complex_from_json(field(j, "scale", path), join(path, "scale"))});
        if (basis == "chebyshev") {
            const json& seg = field(j, "segment", path);
            if (!seg.is_array() || seg.size() != 2) throw ConfigError(join(path, "segment"), "expected [a, b]");
            return ComplexPoly(std::move(coeffs), ChebyshevBasis{complex_from_json(seg[0], join(path, "segment[0]")),
                                                                 complex_from_json(seg[1], join(path, "segment[1]"))});
        }
        throw ConfigError(join(path, "basis"), "unknown basis '" + basis + "'");
    });
}

json to_json(const CompactSet& K) {
    json j;
    if (K.kind() == CompactSet::Kind::Disk) {
        j["kind"] = "disk";
        j["center"] = to_json(K.center());
        j["radius"] = K.radius();
        j["boundary_samples"] = K.boundary_samples();
    } else {
        j["kind"] = "points";
        j["points"] = complexes_to_json(K.samples());
    }
    return j;
}

CompactSet compact_from_json(const json& j, const std::string& path) {
    const auto kind = get_string(j, "kind", path, "disk");
    return wrap(path, [&] {
        if (kind == "disk") {
            const double r = get_double(j, "radius", path);
            if (!(r > 0.0)) throw ConfigError(join(path, "radius"), "must be positive");
            const auto n = get_int(j, "boundary_samples", path, CompactSet::kDefaultBoundarySamples);
            if (n < 8 || n > 1'000'000) throw ConfigError(join(path, "boundary_samples"), "must lie in [8, 1e6]");
            return CompactSet::disk(complex_from_json(field(j, "center", path), join(path, "center")), r,
                                    static_cast<int>(n));
        }
        if (kind == "points") return CompactSet::points(complexes_from_json(field(j, "points", path), join(path, "points")));
        throw ConfigError(join(path, "kind"), "unknown compact kind '" + kind + "'");
    });
}

json to_json(const PlanarDomain& dom) {
    json j;
    if (dom.kind() == PlanarDomain::Kind::RightHalfPlane) {
        j["kind"] = "right_half_plane";
        j["offset"] = dom.offset();
    } else {
        j["kind"] = "open_disk";
        j["center"] = to_json(dom.center());
        j["radius"] = dom.radius();
    }
    if (dom.has_explicit_exhaustion()) {
        json a = json::array();
        for (const auto& K : dom.explicit_exhaustion()) a.push_back(to_json(K));
        j["exhaustion"] = a;
    }
    return j;
}

PlanarDomain domain_from_json(const json& j, const std::string& path) {
    const auto kind = get_string(j, "kind", path);
    return wrap(path, [&] {
        PlanarDomain dom;
        if (kind == "right_half_plane") {
            dom = PlanarDomain::right_half_plane(get_double(j, "offset", path, 0.0));
        } else if (kind == "open_disk") {
            const double r = get_double(j, "radius", path);
            if (!(r > 0.0)) throw ConfigError(join(path, "radius"), "must be positive");
            dom = PlanarDomain::open_disk(complex_from_json(field(j, "center", path), join(path, "center")), r);
        } else {
            throw ConfigError(join(path, "kind"), "unknown domain kind '" + kind + "'");
        }
        if (has(j, "exhaustion")) {
            const std::string ep = join(path, "exhaustion");
            std::vector<CompactSet> members;
            for (std::size_t i = 0; i < need_array(j.at("exhaustion"), ep).size(); ++i)
                members.push_back(compact_from_json(j.at("exhaustion")[i], join(ep, i)));
            dom = wrap(ep, [&] { return dom.with_exhaustion(std::move(members)); });
        }
        return dom;
    });
}

// ---------------------------------------------------------------------------
// maps

json to_json(const maps::SelfMap& phi) {
    json j;
    if (phi.kind() == maps::SelfMap::Kind::Affine) {
        j["kind"] = "affine";
        j["a"] = to_json(phi.a());
        j["b"] = to_json(phi.b());
    } else {
        j["kind"] = "moebius";
        j["m"] = json::array({json::array({to_json(phi.a()), to_json(phi.b())}),
                              json::array({to_json(phi.c()), to_json(phi.d())})});
    }
    return j;
}

maps::SelfMap map_from_json(const json& j, const std::string& path) {
    const auto kind = get_string(j, "kind", path);
    return wrap(path, [&] {
        if (kind == "affine")
            return maps::SelfMap::affine(complex_from_json(field(j, "a", path), join(path, "a")),
                                         complex_from_json(field(j, "b", path), join(path, "b")));
        if (kind == "translation") return maps::SelfMap::translation(complex_from_json(field(j, "b", path), join(path, "b")));
        if (kind == "identity") return maps::SelfMap::identity();
        if (kind == "moebius") {
            const json& m = field(j, "m", path);
            const std::string mp = join(path, "m");
            if (!m.is_array() || m.size() != 2 || !m[0].is_array() || m[0].size() != 2 || !m[1].is_array() ||
                m[1].size() != 2)
                throw ConfigError(mp, "expected [[a, b], [c, d]]");
            return maps::SelfMap::moebius(complex_from_json(m[0][0], mp + "[0][0]"), complex_from_json(m[0][1], mp + "[0][1]"),
                                          complex_from_json(m[1][0], mp + "[1][0]"), complex_from_json(m[1][1], mp + "[1][1]"));
        }
        throw ConfigError(join(path, "kind"), "unknown map kind '" + kind + "'");
    });
}

json to_json(const maps::RunawayCertificate& c) {
    json j;
    j["compact"] = to_json(c.compact);
    j["witness_n"] = c.witness_n;
    j["separation"] = real_to_json(c.separation);
    j["injectivity_margin"] = real_to_json(c.injectivity_margin);
    if (c.lipschitz) j["lipschitz"] = real_to_json(*c.lipschitz);
    if (c.exact_separation) j["exact_separation"] = real_to_json(*c.exact_separation);
    return j;
}

maps::RunawayCertificate runaway_certificate_from_json(const json& j, const std::string& path) {
    maps::RunawayCertificate c;
    c.compact = compact_from_json(field(j, "compact", path), join(path, "compact"));
    c.witness_n = get_int(j, "witness_n", path);
    c.separation = get_double(j, "separation", path);
    c.injectivity_margin = get_double(j, "injectivity_margin", path);
    if (has(j, "lipschitz")) c.lipschitz = get_double(j, "lipschitz", path);
    if (has(j, "exact_separation")) c.exact_separation = get_double(j, "exact_separation", path);
    return c;
}

json to_json(const maps::OrbitProbeResult& r) {
    return json{{"hit", r.hit}, {"n", r.n}, {"error", real_to_json(r.error)}, {"lambda", to_json(r.lambda)}};
}

maps::OrbitProbeResult orbit_probe_from_json(const json& j, const std::string& path) {
    maps::OrbitProbeResult r;
    r.hit = get_bool(j, "hit", path, false);
    r.n = get_int(j, "n", path);
    r.error = get_double(j, "error", path);
    r.lambda = complex_from_json(field(j, "lambda", path), join(path, "lambda"));
    return r;
}

// ---------------------------------------------------------------------------
// luh

json to_json(const luh::DiskChain& ch) {
    json G = json::array();
    for (const auto& g : ch.G) G.push_back(json{{"center", to_json(g.center())}, {"radius", g.radius()}});
    return json{{"G", G},
                {"L", reals_to_json(ch.L)},
                {"r", reals_to_json(ch.r)},
                {"d", reals_to_json(ch.d)},
                {"eps", reals_to_json(ch.eps)},
                {"log_eps", reals_to_json(ch.log_eps)}};
}

luh::DiskChain disk_chain_from_json(const json& j, const std::string& path) {
    luh::DiskChain ch;
    const std::string gp = join(path, "G");
    const json& G = need_array(field(j, "G", path), gp);
    for (std::size_t i = 0; i < G.size(); ++i)
        ch.G.push_back(CompactSet::disk(complex_from_json(field(G[i], "center", join(gp, i)), join(join(gp, i), "center")),
                                        get_double(G[i], "radius", join(gp, i)), 32));
    ch.L = reals_from_json(field(j, "L", path), join(path, "L"));
    ch.r = reals_from_json(field(j, "r", path), join(path, "r"));
    ch.d = reals_from_json(field(j, "d", path), join(path, "d"));
    ch.eps = reals_from_json(field(j, "eps", path), join(path, "eps"));
    ch.log_eps = reals_from_json(field(j, "log_eps", path), join(path, "log_eps"));
    return ch;
}

json to_json(const luh::LuhParams& p) {
    return json{{"enlarge", p.enlarge},         {"placement_gap", p.placement_gap}, {"max_degree", p.max_degree},
                {"degree_step", p.degree_step}, {"fit_samples", p.fit_samples},     {"anchor_radius", p.anchor_radius},
                {"gap_weight", p.gap_weight},   {"gap_spacing", p.gap_spacing},     {"fit_floor", p.fit_floor},
                {"margin", p.margin},           {"max_index", p.max_index},         {"verify_factor", p.verify_factor},
                {"r_scale", p.r_scale}};
}

luh::LuhParams luh_params_from_json(const json& j, const std::string& path) {
    luh::LuhParams p;
    if (j.is_null()) return p;
    if (!j.is_object()) throw ConfigError(path, "expected an object");
    p.enlarge = get_double(j, "enlarge", path, p.enlarge);
    p.placement_gap = get_double(j, "placement_gap", path, p.placement_gap);
    p.max_degree = static_cast<int>(get_int(j, "max_degree", path, p.max_degree));
    p.degree_step = static_cast<int>(get_int(j, "degree_step", path, p.degree_step));
    p.fit_samples = static_cast<int>(get_int(j, "fit_samples", path, p.fit_samples));
    p.anchor_radius = get_double(j, "anchor_radius", path, p.anchor_radius);
    p.gap_weight = get_double(j, "gap_weight", path, p.gap_weight);
    p.gap_spacing = get_double(j, "gap_spacing", path, p.gap_spacing);
    p.fit_floor = get_double(j, "fit_floor", path, p.fit_floor);
    p.margin = get_double(j, "margin", path, p.margin);
    p.max_index = get_int(j, "max_index", path, p.max_index);
    p.verify_factor = static_cast<int>(get_int(j, "verify_factor", path, p.verify_factor));
    p.r_scale = get_double(j, "r_scale", path, p.r_scale);
    return p;
}

json to_json(const luh::LuhTask& t) {
    json targets = json::array(), compacts = json::array();
    for (const auto& f : t.targets) targets.push_back(to_json(f));
    for (const auto& K : t.compacts) compacts.push_back(to_json(K));
    return json{{"domain", to_json(t.domain)}, {"map", to_json(t.phi)},          {"targets", targets},
                {"compacts", compacts},        {"orders", t.orders},             {"tolerances", reals_to_json(t.tolerances)},
                {"params", to_json(t.params)}};
}

luh::LuhTask luh_task_from_json(const json& j, const std::string& path) {
    luh::LuhTask t;
    t.domain = domain_from_json(field(j, "domain", path), join(path, "domain"));
    t.phi = map_from_json(field(j, "map", path), join(path, "map"));
    const std::string tp = join(path, "targets"), cp = join(path, "compacts");
    const json& targets = need_array(field(j, "targets", path), tp);
    for (std::size_t i = 0; i < targets.size(); ++i) t.targets.push_back(poly_from_json(targets[i], join(tp, i)));
    const json& compacts = need_array(field(j, "compacts", path), cp);
    for (std::size_t i = 0; i < compacts.size(); ++i) t.compacts.push_back(compact_from_json(compacts[i], join(cp, i)));
    const std::string op = join(path, "orders");
    const json& orders = field(j, "orders", path);
    if (orders.is_object()) {
        // {"J": 2} is shorthand for -J..J
        const auto J = get_int(orders, "J", op);
        if (J < 0 || J > 50) throw ConfigError(join(op, "J"), "must lie in [0, 50]");
        for (std::int64_t o = -J; o <= J; ++o) t.orders.push_back(static_cast<int>(o));
    } else {
        for (std::size_t i = 0; i < need_array(orders, op).size(); ++i) {
            if (!orders[i].is_number_integer()) throw ConfigError(join(op, i), "expected an integer");
            t.orders.push_back(orders[i].get<int>());
        }
    }
    const json& tol = field(j, "tolerances", path);
    t.tolerances = tol.is_number() ? std::vector<double>{tol.get<double>()}
                                   : reals_from_json(tol, join(path, "tolerances"));
    t.params = luh_params_from_json(has(j, "params") ? j.at("params") : json(), join(path, "params"));
    try {
        t.validate();
    } catch (const std::invalid_argument& e) {
        // validate() names the field first, "field: why"
        const std::string msg = e.what();
        const auto colon = msg.find(':');
        if (colon == std::string::npos) throw ConfigError(path, msg);
        throw ConfigError(join(path, msg.substr(0, colon)), msg.substr(colon + 2));
    }
    return t;
}

json to_json(const luh::Requirement& r) {
    return json{{"target", r.target}, {"order", r.order}, {"compact", r.compact}, {"tolerance", r.tolerance},
                {"eps", real_to_json(r.eps)}};
}

luh::Requirement requirement_from_json(const json& j, const std::string& path) {
    luh::Requirement r;
    r.target = static_cast<int>(get_int(j, "target", path));
    r.order = static_cast<int>(get_int(j, "order", path));
    r.compact = static_cast<int>(get_int(j, "compact", path));
    r.tolerance = static_cast<int>(get_int(j, "tolerance", path));
    r.eps = get_double(j, "eps", path);
    return r;
}

json to_json(const luh::LuhCertificate& c) {
    json entries = json::array();
    for (const auto& e : c.entries) {
        json r = to_json(e.requirement);
        r["covered"] = e.covered;
        r["stage"] = e.stage;
        r["witness"] = e.witness;
        r["error"] = real_to_json(e.error);
        if (e.dense_error) r["dense_error"] = real_to_json(*e.dense_error);
        r["met"] = e.met;
        entries.push_back(r);
    }
    return json{{"stages_run", c.stages_run}, {"complete", c.complete()}, {"entries", entries}};
}

luh::LuhCertificate luh_certificate_from_json(const json& j, const std::string& path) {
    luh::LuhCertificate c;
    c.stages_run = static_cast<int>(get_int(j, "stages_run", path));
    const std::string ep = join(path, "entries");
    const json& entries = need_array(field(j, "entries", path), ep);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string p = join(ep, i);
        luh::RequirementResult r;
        r.requirement = requirement_from_json(entries[i], p);
        r.covered = get_bool(entries[i], "covered", p, false);
        r.stage = static_cast<int>(get_int(entries[i], "stage", p));
        r.witness = get_int(entries[i], "witness", p);
        r.error = get_double(entries[i], "error", p);
        if (has(entries[i], "dense_error")) r.dense_error = get_double(entries[i], "dense_error", p);
        r.met = get_bool(entries[i], "met", p, false);
        c.entries.push_back(r);
    }
    return c;
}

json to_json(const luh::StageRecord& r) {
    std::vector<std::int64_t> idx(r.indices.begin(), r.indices.end());
    return json{{"stage", r.stage},
                {"target", r.target},
                {"orders", r.orders},
                {"indices", idx},
                {"eps_n", real_to_json(r.eps_n)},
                {"tau_n", real_to_json(r.tau_n)},
                {"degree", r.degree},
                {"fit_residual", real_to_json(r.fit_residual)},
                {"correction_sup", real_to_json(r.correction_sup)},
                {"bound", real_to_json(r.bound)},
                {"leakage_sup", real_to_json(r.leakage_sup)},
                {"correction", to_json(r.correction)},
                {"lambda_increment", to_json(r.lambda_increment)}};
}

luh::StageRecord stage_record_from_json(const json& j, const std::string& path) {
    luh::StageRecord r;
    r.stage = static_cast<int>(get_int(j, "stage", path));
    r.target = static_cast<int>(get_int(j, "target", path));
    r.orders = field(j, "orders", path).get<std::vector<int>>();
    r.indices = field(j, "indices", path).get<std::vector<std::int64_t>>();
    r.eps_n = get_double(j, "eps_n", path);
    r.tau_n = get_double(j, "tau_n", path);
    r.degree = static_cast<int>(get_int(j, "degree", path));
    r.fit_residual = get_double(j, "fit_residual", path);
    r.correction_sup = get_double(j, "correction_sup", path);
    r.bound = get_double(j, "bound", path);
    r.leakage_sup = get_double(j, "leakage_sup", path);
    r.correction = poly_from_json(field(j, "correction", path), join(path, "correction"));
    r.lambda_increment = poly_from_json(field(j, "lambda_increment", path), join(path, "lambda_increment"));
    return r;
}

json to_json(const luh::DenseApprox& d) {
    return json{{"f", to_json(d.f)},
                {"delta", real_to_json(d.delta)},
                {"d_delta_f0", real_to_json(d.d_delta_f0)},
                {"d_f_g", real_to_json(d.d_f_g)},
                {"truncation_bound", real_to_json(d.truncation_bound)}};
}

luh::DenseApprox dense_approx_from_json(const json& j, const std::string& path) {
    luh::DenseApprox d;
    d.f = poly_from_json(field(j, "f", path), join(path, "f"));
    d.delta = get_double(j, "delta", path);
    d.d_delta_f0 = get_double(j, "d_delta_f0", path);
    d.d_f_g = get_double(j, "d_f_g", path);
    d.truncation_bound = get_double(j, "truncation_bound", path);
    return d;
}

// ---------------------------------------------------------------------------
// cosine

json to_json(const cosine::GridFunction& f) {
    return json{{"cells_per_unit", f.cells_per_unit()}, {"start", f.start()}, {"values", reals_to_json(f.values())}};
}

cosine::GridFunction grid_function_from_json(const json& j, const std::string& path, int cells_per_unit) {
    return wrap(path, [&] {
        if (has(j, "indicator")) {
            const auto ab = reals_from_json(field(j, "indicator", path), join(path, "indicator"));
            if (ab.size() != 2 || !(ab[1] > ab[0])) throw ConfigError(join(path, "indicator"), "expected [a, b] with a < b");
            const double scale = get_double(j, "scale", path, 1.0);
            return cosine::GridFunction::indicator(ab[0], ab[1], cells_per_unit) * scale;
        }
        const auto m = get_int(j, "cells_per_unit", path, cells_per_unit);
        if (m != cells_per_unit) throw ConfigError(join(path, "cells_per_unit"), "does not match the grid");
        return cosine::GridFunction(static_cast<int>(m), get_int(j, "start", path),
                                    reals_from_json(field(j, "values", path), join(path, "values")));
    });
}

json to_json(const cosine::Weight& w) {
    return json{{"kind", "piecewise_linear"}, {"knots", reals_to_json(w.knots())}, {"values", reals_to_json(w.values())}};
}

cosine::Weight weight_from_json(const json& j, const std::string& path) {
    const auto kind = get_string(j, "kind", path);
    return wrap(path, [&] {
        if (kind == "constant") return cosine::Weight::constant(get_double(j, "value", path));
        if (kind == "example") return cosine::example_weight(get_double(j, "M", path), get_double(j, "delta", path));
        if (kind == "piecewise_linear")
            return cosine::Weight::piecewise_linear(reals_from_json(field(j, "knots", path), join(path, "knots")),
                                                    reals_from_json(field(j, "values", path), join(path, "values")));
        throw ConfigError(join(path, "kind"), "unknown weight kind '" + kind + "'");
    });
}

json to_json(const cosine::NormSpec& s) {
    switch (s.kind) {
        case cosine::NormSpec::Kind::Lp: return json{{"kind", "lp"}, {"p", s.p}};
        case cosine::NormSpec::Kind::Sup: return json{{"kind", "sup"}};
        case cosine::NormSpec::Kind::Orlicz:
            if (s.young == cosine::NormSpec::Young::Exp) return json{{"kind", "orlicz"}, {"young", "exp"}};
            return json{{"kind", "orlicz"}, {"young", "power"}, {"p", s.p}};
    }
    return {};
}

cosine::NormSpec norm_spec_from_json(const json& j, const std::string& path) {
    return wrap(path, [&] {
        if (j.is_string()) {
            const auto s = j.get<std::string>();
            if (s == "sup") return cosine::NormSpec::sup();
            if (s == "L1") return cosine::NormSpec::lp(1.0);
            if (s == "L2") return cosine::NormSpec::lp(2.0);
            throw ConfigError(path, "unknown norm '" + s + "'");
        }
        const auto kind = get_string(j, "kind", path);
        if (kind == "lp") return cosine::NormSpec::lp(get_double(j, "p", path));
        if (kind == "sup") return cosine::NormSpec::sup();
        if (kind == "orlicz") {
            const auto young = get_string(j, "young", path, "power");
            if (young == "exp") return cosine::NormSpec::orlicz_exp();
            if (young == "power") return cosine::NormSpec::orlicz_power(get_double(j, "p", path));
            throw ConfigError(join(path, "young"), "unknown Young function '" + young + "'");
        }
        throw ConfigError(join(path, "kind"), "unknown norm kind '" + kind + "'");
    });
}

namespace {

json intervals_to_json(const cosine::IntervalSet& s) {
    json a = json::array();
    for (const auto& [lo, hi] : s) a.push_back(json::array({lo, hi}));
    return a;
}

cosine::IntervalSet intervals_from_json(const json& j, const std::string& path) {
    cosine::IntervalSet out;
    for (std::size_t i = 0; i < need_array(j, path).size(); ++i) {
        const auto ab = reals_from_json(j[i], join(path, i));
        if (ab.size() != 2 || !(ab[1] >= ab[0])) throw ConfigError(join(path, i), "expected [a, b] with a <= b");
        out.emplace_back(ab[0], ab[1]);
    }
    return out;
}

}  // namespace

json to_json(const cosine::PartitionScheme& s) {
    switch (s.kind()) {
        case cosine::PartitionScheme::Kind::Whole: return json{{"kind", "whole"}};
        case cosine::PartitionScheme::Kind::Threshold: return json{{"kind", "threshold"}};
        case cosine::PartitionScheme::Kind::Explicit: {
            json sets = json::array();
            for (const auto& e : s.table())
                sets.push_back(json{{"E", intervals_to_json(e.E)}, {"D", intervals_to_json(e.D)}, {"F", intervals_to_json(e.F)}});
            return json{{"kind", "explicit"}, {"sets", sets}};
        }
    }
    return {};
}

cosine::PartitionScheme partition_scheme_from_json(const json& j, const std::string& path) {
    const auto kind = j.is_string() ? j.get<std::string>() : get_string(j, "kind", path);
    if (kind == "whole") return cosine::PartitionScheme::whole();
    if (kind == "threshold") return cosine::PartitionScheme::threshold();
    if (kind == "explicit") {
        const std::string sp = join(path, "sets");
        const json& sets = need_array(field(j, "sets", path), sp);
        std::vector<cosine::PartitionScheme::Sets> table;
        for (std::size_t i = 0; i < sets.size(); ++i) {
            const std::string p = join(sp, i);
            table.push_back({intervals_from_json(field(sets[i], "E", p), join(p, "E")),
                             intervals_from_json(field(sets[i], "D", p), join(p, "D")),
                             intervals_from_json(field(sets[i], "F", p), join(p, "F"))});
        }
        return wrap(sp, [&] { return cosine::PartitionScheme::explicit_sets(std::move(table)); });
    }
    throw ConfigError(join(path, "kind"), "unknown partition scheme '" + kind + "'");
}

json to_json(const cosine::ConditionReport& r) {
    json seqs = json::object(), verdicts = json::object();
    for (int s = 0; s < cosine::kConditionSequences; ++s) {
        const auto i = static_cast<std::size_t>(s);
        seqs[cosine::ConditionReport::names()[i]] = reals_to_json(r.seq[i]);
        verdicts[cosine::ConditionReport::names()[i]] = r.seq_pass[i] ? "pass" : "fail";
    }
    return json{{"k", r.k},
                {"n", r.n},
                {"tau", real_to_json(r.tau)},
                {"sequences", seqs},
                {"sequence_verdicts", verdicts},
                {"verdict", r.pass ? "pass" : "conditions not met"},
                {"pass", r.pass},
                {"one_sided_backward", reals_to_json(r.one_sided_backward)},
                {"one_sided_forward_inverse", reals_to_json(r.one_sided_forward_inverse)}};
}

cosine::ConditionReport condition_report_from_json(const json& j, const std::string& path) {
    cosine::ConditionReport r;
    r.k = field(j, "k", path).get<std::vector<int>>();
    r.n = field(j, "n", path).get<std::vector<int>>();
    r.tau = get_double(j, "tau", path);
    const json& seqs = field(j, "sequences", path);
    const json& verdicts = field(j, "sequence_verdicts", path);
    for (int s = 0; s < cosine::kConditionSequences; ++s) {
        const auto i = static_cast<std::size_t>(s);
        const auto& name = cosine::ConditionReport::names()[i];
        r.seq[i] = reals_from_json(field(seqs, name, join(path, "sequences")), join(join(path, "sequences"), name));
        r.seq_pass[i] = get_string(verdicts, name, join(path, "sequence_verdicts")) == "pass";
    }
    r.pass = get_bool(j, "pass", path, false);
    r.one_sided_backward = reals_from_json(field(j, "one_sided_backward", path), join(path, "one_sided_backward"));
    r.one_sided_forward_inverse =
        reals_from_json(field(j, "one_sided_forward_inverse", path), join(path, "one_sided_forward_inverse"));
    return r;
}

namespace {

json row_to_json(const cosine::DemoRow& r) {
    return json{{"k", r.k}, {"n", r.n}, {"a", real_to_json(r.a)}, {"b", real_to_json(r.b)}, {"lambda", real_to_json(r.lambda)}};
}

cosine::DemoRow row_from_json(const json& j, const std::string& path) {
    cosine::DemoRow r;
    r.k = static_cast<int>(get_int(j, "k", path));
    r.n = static_cast<int>(get_int(j, "n", path));
    r.a = get_double(j, "a", path);
    r.b = get_double(j, "b", path);
    r.lambda = get_double(j, "lambda", path);
    return r;
}

}  // namespace

json to_json(const cosine::DemoReport& r) {
    json rows = json::array(), skipped = json::array();
    for (const auto& row : r.rows) rows.push_back(row_to_json(row));
    for (const auto& [k, why] : r.skipped) skipped.push_back(json{{"k", k}, {"reason", why}});
    json j{{"rows", rows}, {"skipped", skipped}, {"tol", real_to_json(r.tol)}, {"hit", r.hit},
           {"verdict", r.hit ? "hit" : "miss"}};
    j["k0"] = r.k0 ? json(*r.k0) : json();
    j["best"] = r.best ? row_to_json(*r.best) : json();
    return j;
}

cosine::DemoReport demo_report_from_json(const json& j, const std::string& path) {
    cosine::DemoReport r;
    const std::string rp = join(path, "rows"), sp = join(path, "skipped");
    const json& rows = need_array(field(j, "rows", path), rp);
    for (std::size_t i = 0; i < rows.size(); ++i) r.rows.push_back(row_from_json(rows[i], join(rp, i)));
    const json& skipped = need_array(field(j, "skipped", path), sp);
    for (std::size_t i = 0; i < skipped.size(); ++i)
        r.skipped.emplace_back(static_cast<int>(get_int(skipped[i], "k", join(sp, i))),
                               get_string(skipped[i], "reason", join(sp, i)));
    r.tol = get_double(j, "tol", path);
    r.hit = get_bool(j, "hit", path, false);
    if (has(j, "k0") && !j.at("k0").is_null()) r.k0 = static_cast<int>(get_int(j, "k0", path));
    if (has(j, "best") && !j.at("best").is_null()) r.best = row_from_json(j.at("best"), join(path, "best"));
    return r;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace lindyn::io

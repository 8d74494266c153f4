#include "lindyn/luh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <variant>
#include <array>

#include "lindyn/parallel.hpp"

namespace lindyn::luh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Disk {
    cplx c;
    double r;
};

double gap_between(const Disk& a, const Disk& b) { return std::abs(a.c - b.c) - a.r - b.r; }

int order_rank(int j) { return j == 0 ? 0 : (j > 0 ? 2 * j - 1 : -2 * j); }

double factorial_direct(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive");
}

int last_planned_stage(const LuhStageState& s) {
    int n = s.stage;
    for (const auto& p : s.placements) n = std::max(n, p.stage);
    return n;
}

std::vector<Disk> fixed_regions(const LuhTask& task) {
    std::vector<Disk> out;
    for (const auto& K : task.compacts) out.push_back({K.center(), K.radius() + task.params.enlarge});
    return out;
}

std::optional<Disk> anchor_region(const LuhTask& task, const std::vector<Disk>& regions) {
    if (task.lowest_order() == 0) return std::nullopt;
    const Disk a{cplx{}, task.params.anchor_radius};
    for (const auto& r : regions)
        if (std::abs(r.c) <= r.r) return std::nullopt;  // origin already pinned by a region
    return a;
}

std::vector<Disk> placement_regions(const Placement& p, double enlarge) {
    std::vector<Disk> out;
    for (const auto& K : p.images) out.push_back({K.center(), K.radius() + enlarge});
    return out;
}

// Target for the master polynomial on a placement: an antiderivative of order J_lo + j
// of f_k o phi_s^{-1}, expanded about the placement's centroid to keep it small.
ComplexPoly local_target(const LuhTask& task, const Placement& p) {
    const int m = task.lowest_order() + p.order;
    const SelfMap ps = maps::iterate(task.phi, p.index);
    cplx centroid{};
    for (const auto& K : p.images) centroid += K.center();
    centroid /= static_cast<double>(p.images.size());
    const cplx alpha = ps.a(), beta = ps.b();
    const ComplexPoly g = holo::to_standard(holo::compose_affine(task.targets[p.target], 1.0 / alpha,
                                                                 (centroid - beta) / alpha));
    return holo::compose_affine(holo::antiderivative(g, m), 1.0, -centroid);
}

}  // namespace

// ---------------------------------------------------------------------------
// Schedule

double DiskChain::eps_at(int n) const {
    if (eps.empty()) return kInf;
    if (n < 1) throw std::out_of_range("stage index is 1-based");
    return eps[static_cast<std::size_t>(std::min(n, stages())) - 1];
}

double schedule_log_epsilon(int n, double d_prev, double L_n, double r_n) {
    if (n < 1) throw std::invalid_argument("stage index must be positive");
    require_positive(d_prev, "d_{n-1}");
    require_positive(L_n, "L_n");
    require_positive(r_n, "r_n");
    const double N = n;
    const double t1 = std::log(2.0 * std::numbers::pi) + 2.0 * N * std::log(d_prev) - std::lgamma(2.0 * N) -
                      std::log(L_n) - 2.0 * std::log(N);
    const double t2 = 2.0 * N * std::log(r_n) - std::lgamma(2.0 * N + 1.0) - (2.0 * N + 1.0) * std::log(2.0) -
                      std::log(N);
    return std::min(t1, t2);
}

double schedule_epsilon(int n, double d_prev, double L_n, double r_n) {
    return std::exp(schedule_log_epsilon(n, d_prev, L_n, r_n));
}

double schedule_epsilon_direct(int n, double d_prev, double L_n, double r_n) {
    if (n < 1) throw std::invalid_argument("stage index must be positive");
    if (n > 85) throw std::range_error("direct factorials overflow beyond n = 85");
    const double t1 = 2.0 * std::numbers::pi * std::pow(d_prev, 2 * n) /
                      (factorial_direct(2 * n - 1) * L_n * static_cast<double>(n) * n);
    const double t2 = std::pow(r_n, 2 * n) / (factorial_direct(2 * n) * std::pow(2.0, 2 * n + 1) * n);
    return std::min(t1, t2);
}

InfeasibleChain::InfeasibleChain(int stage, const std::string& why)
    : std::runtime_error("disk chain infeasible at stage " + std::to_string(stage) + ": " + why), stage_(stage) {}

DiskChain make_disk_chain(const PlanarDomain& dom, int stages, double r_scale) {
    if (stages < 1) throw std::invalid_argument("stages must be positive");
    if (!(r_scale > 0.0 && r_scale < 1.0)) throw std::invalid_argument("r_scale must lie in (0, 1)");
    DiskChain ch;
    std::vector<Disk> G;
    for (int n = 1; n <= stages + 1; ++n) {
        Disk g;
        if (dom.kind() == PlanarDomain::Kind::RightHalfPlane) {
            // Disks growing to the right with their left ends creeping toward the boundary.
            const double s = std::ldexp(1.0, n + 1), mu = std::ldexp(1.0, -n - 1);
            g = {cplx{dom.offset() + s, 0.0}, s - mu};
        } else {
            g = {dom.center(), dom.radius() * (1.0 - std::ldexp(1.0, -n - 1))};
        }
        const auto disk = CompactSet::disk(g.c, g.r, 32);
        if (!dom.contains(disk, 0.0)) throw InfeasibleChain(n, "G_n leaves the domain");
        G.push_back(g);
        ch.G.push_back(disk);
    }
    ch.d.push_back(1.0);
    for (int n = 1; n <= stages; ++n) {
        const Disk& gn = G[n - 1];
        const Disk& gn1 = G[n];
        if (auto len = dom.exhaustion_length(); len && n > *len)
            throw InfeasibleChain(n, "exhaustion has only " + std::to_string(*len) + " members");
        const CompactSet K = dom.exhaustion(n);
        double distK = kInf;
        if (K.kind() == CompactSet::Kind::Disk) {
            distK = gn1.r - std::abs(K.center() - gn1.c) - K.radius();
        } else {
            for (auto z : K.samples()) distK = std::min(distK, gn1.r - std::abs(z - gn1.c));
        }
        const double distG = gn1.r - gn.r - std::abs(gn1.c - gn.c);
        if (!(distK > 0.0)) throw InfeasibleChain(n, "exhaustion member K_n is not inside G_{n+1}");
        if (!(distG > 0.0)) throw InfeasibleChain(n, "closure of G_n is not inside G_{n+1}");
        ch.d.push_back(std::min({distK, distG, 1.0}));
        ch.L.push_back(2.0 * std::numbers::pi * gn.r);
        ch.r.push_back(r_scale / n);
        const double le = schedule_log_epsilon(n, ch.d[n - 1], ch.L.back(), ch.r.back());
        ch.log_eps.push_back(le);
        ch.eps.push_back(std::exp(le));
    }
    return ch;
}

// ---------------------------------------------------------------------------
// Fitting oracle

MergelyanFit mergelyan_fit(const CompactSet& A, const Evaluable& fA, const CompactSet& B, const Evaluable& fB,
                           double tol, int max_degree) {
    require_positive(tol, "tolerance");
    if (max_degree < 0) throw std::invalid_argument("max degree must be nonnegative");
    std::vector<cplx> pts = A.samples();
    pts.insert(pts.end(), B.samples().begin(), B.samples().end());
    std::vector<cplx> rhs;
    rhs.reserve(pts.size());
    for (auto z : A.samples()) rhs.push_back(fA(z));
    for (auto z : B.samples()) rhs.push_back(fB(z));
    const fit::ArnoldiFitter fitter(pts, std::vector<double>(pts.size(), 1.0), max_degree);
    const std::vector<char> all(pts.size(), 1);
    const holo::Basis basis = fitter.natural_basis();

    double best = kInf;
    int best_deg = 0;
    for (int start = 0; start <= fitter.max_degree();) {
        const auto esc = fit::escalate(fitter, rhs, all, tol, start, 1);
        if (!esc.ok) {
            if (esc.residual < best) best = esc.residual, best_deg = esc.degree;
            break;
        }
        MergelyanFit out;
        out.poly = fitter.to_poly(esc.coeffs, basis);
        out.degree = esc.degree;
        const auto& sa = A.samples();
        for (std::size_t i = 0; i < sa.size(); ++i) out.residual_A = std::max(out.residual_A, std::abs(out.poly(sa[i]) - rhs[i]));
        const auto& sb = B.samples();
        for (std::size_t i = 0; i < sb.size(); ++i)
            out.residual_B = std::max(out.residual_B, std::abs(out.poly(sb[i]) - rhs[sa.size() + i]));
        const double r = std::max(out.residual_A, out.residual_B);
        if (r < tol) return out;
        if (r < best) best = r, best_deg = esc.degree;
        start = esc.degree + 1;
    }
    throw fit::FitFailure("no polynomial of degree <= " + std::to_string(max_degree) + " meets tolerance", best,
                          best_deg);
}

// ---------------------------------------------------------------------------
// Task

int LuhTask::lowest_order() const {
    int lo = 0;
    for (int j : orders) lo = std::max(lo, -j);
    return lo;
}

int LuhTask::highest_order() const {
    int hi = 0;
    for (int j : orders) hi = std::max(hi, j);
    return hi;
}

void LuhTask::validate() const {
    if (phi.kind() != SelfMap::Kind::Affine) throw std::invalid_argument("map: the construction needs an affine map");
    if (phi.is_identity()) throw std::invalid_argument("map: the identity has no run-away iterates");
    if (targets.empty()) throw std::invalid_argument("targets: at least one target is required");
    for (std::size_t i = 0; i < targets.size(); ++i)
        for (auto c : targets[i].coeffs())
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
                throw std::invalid_argument("targets[" + std::to_string(i) + "]: coefficients must be finite");
    if (compacts.empty()) throw std::invalid_argument("compacts: at least one compact is required");
    for (std::size_t i = 0; i < compacts.size(); ++i) {
        if (compacts[i].kind() != CompactSet::Kind::Disk)
            throw std::invalid_argument("compacts[" + std::to_string(i) + "]: must be a closed disk");
        if (!domain.contains(compacts[i], 0.0))
            throw std::invalid_argument("compacts[" + std::to_string(i) + "]: not inside the domain");
    }
    if (orders.empty()) throw std::invalid_argument("orders: at least one order is required");
    if (std::set<int>(orders.begin(), orders.end()).size() != orders.size())
        throw std::invalid_argument("orders: duplicates are not allowed");
    if (tolerances.empty()) throw std::invalid_argument("tolerances: at least one tolerance is required");
    for (std::size_t i = 0; i < tolerances.size(); ++i) {
        if (!(tolerances[i] > 0.0)) throw std::invalid_argument("tolerances[" + std::to_string(i) + "]: must be positive");
        if (i > 0 && !(tolerances[i] < tolerances[i - 1]))
            throw std::invalid_argument("tolerances[" + std::to_string(i) + "]: must be strictly decreasing");
    }
    const auto& p = params;
    if (!(p.enlarge >= 0.0)) throw std::invalid_argument("params.enlarge: must be nonnegative");
    if (!(p.placement_gap >= 0.0)) throw std::invalid_argument("params.placement_gap: must be nonnegative");
    if (p.max_degree < 1) throw std::invalid_argument("params.max_degree: must be positive");
    if (p.degree_step < 1) throw std::invalid_argument("params.degree_step: must be positive");
    if (p.fit_samples < 8) throw std::invalid_argument("params.fit_samples: must be at least 8");
    if (!(p.anchor_radius > 0.0)) throw std::invalid_argument("params.anchor_radius: must be positive");
    if (!(p.gap_weight >= 0.0)) throw std::invalid_argument("params.gap_weight: must be nonnegative");
    if (!(p.gap_spacing > 0.0)) throw std::invalid_argument("params.gap_spacing: must be positive");
    if (!(p.fit_floor > 0.0)) throw std::invalid_argument("params.fit_floor: must be positive");
    if (!(p.margin > 0.0)) throw std::invalid_argument("params.margin: must be positive");
    if (p.max_index < 1) throw std::invalid_argument("params.max_index: must be positive");
    if (p.verify_factor < 1) throw std::invalid_argument("params.verify_factor: must be positive");
    if (!(p.r_scale > 0.0 && p.r_scale < 1.0)) throw std::invalid_argument("params.r_scale: must lie in (0, 1)");
}

std::vector<Requirement> enumerate_requirements(const LuhTask& task) {
    std::vector<int> orders = task.orders;
    std::sort(orders.begin(), orders.end(), [](int a, int b) { return order_rank(a) < order_rank(b); });
    std::vector<std::pair<std::array<int, 5>, Requirement>> keyed;
    for (int m = 0; m < static_cast<int>(task.tolerances.size()); ++m)
        for (int k = 0; k < static_cast<int>(task.targets.size()); ++k)
            for (int jr = 0; jr < static_cast<int>(orders.size()); ++jr)
                for (int c = 0; c < static_cast<int>(task.compacts.size()); ++c)
                    keyed.push_back({{m + k + jr + c, m, k, jr, c}, {k, orders[jr], c, m, task.tolerances[m]}});
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Requirement> out;
    for (auto& [key, r] : keyed) out.push_back(r);
    return out;
}

// ---------------------------------------------------------------------------
// Fit context: one Arnoldi basis over every region of the layout

struct FitContext {
    enum class Kind { Fixed, Anchor, Placement, Gap };
    struct Block {
        Kind kind;
        int placement;
        std::size_t begin, end;
    };
    std::unique_ptr<fit::ArnoldiFitter> fitter;
    std::vector<Block> blocks;
    std::vector<char> checked;
    holo::Basis basis;
    std::size_t layout_size{0};
};

namespace {

std::shared_ptr<const FitContext> build_context(const LuhTask& task, const std::vector<Placement>& placements) {
    const auto& P = task.params;
    auto ctx = std::make_shared<FitContext>();
    std::vector<cplx> pts;
    std::vector<double> w;
    std::vector<Disk> all;
    auto add_circle = [&](const Disk& d, FitContext::Kind kind, int placement) {
        const std::size_t begin = pts.size();
        for (int i = 0; i < P.fit_samples; ++i) {
            pts.push_back(d.c + std::polar(d.r, 2.0 * std::numbers::pi * i / P.fit_samples));
            w.push_back(1.0);
        }
        ctx->blocks.push_back({kind, placement, begin, pts.size()});
        all.push_back(d);
    };
    const auto fixed = fixed_regions(task);
    for (const auto& d : fixed) add_circle(d, FitContext::Kind::Fixed, -1);
    std::vector<Disk> occupied = fixed;
    for (const auto& p : placements)
        for (const auto& d : placement_regions(p, P.enlarge)) occupied.push_back(d);
    if (auto a = anchor_region(task, occupied)) add_circle(*a, FitContext::Kind::Anchor, -1);
    for (std::size_t i = 0; i < placements.size(); ++i)
        for (const auto& d : placement_regions(placements[i], P.enlarge))
            add_circle(d, FitContext::Kind::Placement, static_cast<int>(i));

    // Weak zero-valued samples bridging neighbouring regions keep the fit tame in between.
    if (P.gap_weight > 0.0 && all.size() > 1) {
        cplx m{};
        for (const auto& d : all) m += d.c;
        m /= static_cast<double>(all.size());
        double sxx = 0, syy = 0, sxy = 0;
        for (const auto& d : all) {
            const cplx e = d.c - m;
            sxx += e.real() * e.real();
            syy += e.imag() * e.imag();
            sxy += e.real() * e.imag();
        }
        const cplx dir = std::polar(1.0, 0.5 * std::atan2(2.0 * sxy, sxx - syy));
        std::vector<Disk> order = all;
        std::stable_sort(order.begin(), order.end(),
                         [&](const Disk& a, const Disk& b) { return ((a.c - m) / dir).real() < ((b.c - m) / dir).real(); });
        const std::size_t begin = pts.size();
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            const cplx a = order[i].c, b = order[i + 1].c;
            const double len = std::abs(b - a);
            const int steps = static_cast<int>(std::floor(len / P.gap_spacing));
            for (int s = 1; s < steps; ++s) {
                const cplx z = a + (b - a) * (static_cast<double>(s) / steps);
                const bool inside = std::any_of(all.begin(), all.end(), [&](const Disk& d) {
                    return std::abs(z - d.c) < d.r + 0.5 * P.gap_spacing;
                });
                if (inside) continue;
                pts.push_back(z);
                w.push_back(P.gap_weight);
            }
        }
        if (pts.size() > begin) ctx->blocks.push_back({FitContext::Kind::Gap, -1, begin, pts.size()});
    }

    ctx->checked.assign(pts.size(), 1);
    for (const auto& b : ctx->blocks)
        if (b.kind == FitContext::Kind::Gap)
            for (std::size_t i = b.begin; i < b.end; ++i) ctx->checked[i] = 0;
    ctx->fitter = std::make_unique<fit::ArnoldiFitter>(std::move(pts), std::move(w), P.max_degree);
    ctx->basis = ctx->fitter->natural_basis();
    ctx->layout_size = placements.size();
    return ctx;
}

double compacts_diameter(const std::vector<CompactSet>& ks) {
    double d = 0.0;
    for (const auto& a : ks)
        for (const auto& b : ks) d = std::max(d, std::abs(a.center() - b.center()) + a.radius() + b.radius());
    return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// Stages

StageBoundViolation::StageBoundViolation(int stage, double measured, double bound)
    : std::runtime_error("stage " + std::to_string(stage) + " correction sup " + std::to_string(measured) +
                         " exceeds the bound " + std::to_string(bound)),
      stage_(stage),
      measured_(measured) {}

StageFitFailure::StageFitFailure(int stage, double tol, double best_residual, int best_degree)
    : fit::FitFailure("stage " + std::to_string(stage) + " fit missed tolerance " + std::to_string(tol) +
                          " (best residual " + std::to_string(best_residual) + " at degree " +
                          std::to_string(best_degree) + ")",
                      best_residual, best_degree),
      stage_(stage) {}

LuhStageState initial_state(const LuhTask& task, DiskChain schedule) {
    task.validate();
    LuhStageState s;
    s.schedule = std::move(schedule);
    return s;
}

StagePlan plan_stage(const LuhStageState& state, const LuhTask& task, const Requirement& requirement) {
    const int n = last_planned_stage(state) + 1;
    std::vector<int> orders;
    for (int j : task.orders) {
        if (std::abs(j) > n) continue;
        const bool planned = std::any_of(state.placements.begin(), state.placements.end(), [&](const Placement& p) {
            return p.target == requirement.target && p.order == j;
        });
        if (!planned) orders.push_back(j);
    }
    if (std::find(orders.begin(), orders.end(), requirement.order) == orders.end() &&
        std::abs(requirement.order) <= n) {
        throw std::invalid_argument("requirement is already planned");
    }
    return plan_stage(state, task, requirement, orders);
}

StagePlan plan_stage(const LuhStageState& state, const LuhTask& task, const Requirement& requirement,
                     const std::vector<int>& orders_in) {
    if (requirement.target < 0 || requirement.target >= static_cast<int>(task.targets.size()))
        throw std::invalid_argument("requirement target index out of range");
    if (orders_in.empty()) throw std::invalid_argument("no pending orders to plan");
    const auto& P = task.params;
    StagePlan plan;
    plan.stage = last_planned_stage(state) + 1;
    plan.target = requirement.target;
    plan.r_n = P.r_scale / plan.stage;
    std::vector<cplx> union_pts;
    for (const auto& K : task.compacts) union_pts.insert(union_pts.end(), K.samples().begin(), K.samples().end());
    plan.k_double_prime = CompactSet::points(std::move(union_pts));

    std::vector<int> orders = orders_in;
    std::stable_sort(orders.begin(), orders.end(), [](int a, int b) { return order_rank(a) < order_rank(b); });

    std::vector<Disk> occupied = fixed_regions(task);
    std::int64_t prev = 0;
    for (const auto& p : state.placements) {
        for (const auto& d : placement_regions(p, P.enlarge)) occupied.push_back(d);
        prev = std::max(prev, p.index);
    }
    if (auto a = anchor_region(task, occupied)) occupied.push_back(*a);
    const double diam = compacts_diameter(task.compacts);

    for (int j : orders) {
        std::int64_t s = prev + 1;
        if (prev > 0) s = std::max(s, prev + static_cast<std::int64_t>(std::ceil(diam)));
        bool found = false;
        for (; s <= P.max_index; ++s) {
            const SelfMap ps = maps::iterate(task.phi, s);
            Placement cand{plan.stage, requirement.target, j, s, {}};
            bool ok = true;
            for (const auto& K : task.compacts) {
                auto img = maps::image_disk(ps, K);
                if (!task.domain.contains(img, 0.0)) ok = false;
                cand.images.push_back(std::move(img));
            }
            if (!ok) continue;
            for (const auto& d : placement_regions(cand, P.enlarge))
                for (const auto& o : occupied)
                    if (gap_between(d, o) < P.placement_gap) ok = false;
            if (!ok) continue;
            // Geometry is fine; confirm the run-away certificate on the sampled union.
            const auto cert = maps::runaway_check(task.phi, plan.k_double_prime, s, P.margin);
            if (!std::holds_alternative<maps::RunawayCertificate>(cert)) continue;
            for (const auto& d : placement_regions(cand, P.enlarge)) occupied.push_back(d);
            plan.placements.push_back(std::move(cand));
            prev = s;
            found = true;
            break;
        }
        if (!found) throw maps::ExhaustedSearch(1, P.max_index);
    }

    for (std::size_t a = 0; a < plan.placements.size(); ++a)
        for (std::size_t b = a + 1; b < plan.placements.size(); ++b) {
            double sep = kInf;
            for (const auto& x : plan.placements[a].images)
                for (const auto& y : plan.placements[b].images)
                    sep = std::min(sep, gap_between({x.center(), x.radius()}, {y.center(), y.radius()}));
            plan.separations.push_back(sep);
        }
    return plan;
}

LuhStageState with_plan(const LuhStageState& state, const StagePlan& plan) {
    LuhStageState s = state;
    const bool present = std::any_of(s.placements.begin(), s.placements.end(),
                                     [&](const Placement& p) { return p.stage == plan.stage; });
    if (!present) s.placements.insert(s.placements.end(), plan.placements.begin(), plan.placements.end());
    return s;
}

LuhStageState build_stage(const LuhStageState& state, const StagePlan& plan, const LuhTask& task) {
    if (plan.stage != state.stage + 1)
        throw std::invalid_argument("plan is for stage " + std::to_string(plan.stage) + " but the state is at stage " +
                                    std::to_string(state.stage));
    const auto& P = task.params;
    LuhStageState s = with_plan(state, plan);
    const int n = plan.stage;
    if (!s.fit || s.fit->layout_size != s.placements.size()) s.fit = build_context(task, s.placements);
    const FitContext& ctx = *s.fit;
    const auto& pts = ctx.fitter->points();

    // Right-hand side of the increment: reach the local target on this stage's placements,
    // stay put everywhere else.
    std::vector<cplx> rhs(pts.size(), cplx{});
    std::map<int, ComplexPoly> targets;
    for (const auto& b : ctx.blocks) {
        if (b.kind != FitContext::Kind::Placement) continue;
        const Placement& pl = s.placements[static_cast<std::size_t>(b.placement)];
        if (pl.stage != n) continue;
        auto it = targets.find(b.placement);
        if (it == targets.end()) it = targets.emplace(b.placement, local_target(task, pl)).first;
        for (std::size_t i = b.begin; i < b.end; ++i) rhs[i] = it->second(pts[i]) - s.master(pts[i]);
    }

    const int Jlo = task.lowest_order(), Jhi = task.highest_order();
    const int span = Jlo + Jhi;
    std::set<int> stage_ids;
    for (const auto& p : s.placements) stage_ids.insert(p.stage);
    const double eps_min = *std::min_element(task.tolerances.begin(), task.tolerances.end());
    double factorial = 1.0;
    for (int i = 2; i <= span; ++i) factorial *= i;
    // Derivatives of order up to span amplify the fit error by span!/enlarge^span on the
    // certified disks (Cauchy); split eps_min evenly over the stages.
    const double budget =
        P.enlarge > 0.0 ? eps_min * std::pow(P.enlarge, span) / (factorial * static_cast<double>(stage_ids.size())) : 0.0;
    const double eps_n = s.schedule.eps_at(n);
    const double tau = std::max(P.fit_floor, std::min(eps_n, budget));

    const auto esc = fit::escalate(*ctx.fitter, rhs, ctx.checked, tau, 0, P.degree_step);
    if (!esc.ok) throw StageFitFailure(n, tau, esc.residual, esc.degree);

    ComplexPoly C = ctx.fitter->to_poly(esc.coeffs, ctx.basis);
    if (Jlo > 0) {
        // Exact normalization: derivatives below order J_lo vanish at the origin.
        std::vector<cplx> taylor(static_cast<std::size_t>(Jlo));
        double fact = 1.0;
        for (int i = 0; i < Jlo; ++i) {
            if (i > 0) fact *= i;
            taylor[static_cast<std::size_t>(i)] = holo::derivative(C, i)(cplx{}) / fact;
        }
        C -= ComplexPoly(std::move(taylor));
    }
    const ComplexPoly c = holo::derivative(C, Jlo);

    StageRecord rec;
    rec.stage = n;
    rec.target = plan.target;
    for (const auto& p : plan.placements) {
        rec.orders.push_back(p.order);
        rec.indices.push_back(p.index);
    }
    rec.eps_n = eps_n;
    rec.tau_n = tau;
    rec.degree = esc.degree;
    rec.fit_residual = esc.residual;
    for (const auto& K : task.compacts) rec.correction_sup = std::max(rec.correction_sup, holo::sup_norm_on(c, K));
    rec.bound = 2.0 / (static_cast<double>(n) * n);
    for (const auto& p : s.placements)
        if (p.stage != n)
            for (const auto& K : p.images) rec.leakage_sup = std::max(rec.leakage_sup, holo::sup_norm_on(c, K));
    if (n >= 2 && rec.correction_sup > rec.bound) throw StageBoundViolation(n, rec.correction_sup, rec.bound);
    rec.correction = c;
    rec.lambda_increment = holo::antiderivative(c, n);

    s.h_partial += c;
    s.master += C;
    s.lambda += rec.lambda_increment;
    s.stage = n;
    s.records.push_back(std::move(rec));
    for (const auto& p : plan.placements)
        for (int c_idx = 0; c_idx < static_cast<int>(task.compacts.size()); ++c_idx)
            for (int m = 0; m < static_cast<int>(task.tolerances.size()); ++m)
                s.handled.push_back({p.target, p.order, c_idx, m, task.tolerances[static_cast<std::size_t>(m)]});
    return s;
}

// ---------------------------------------------------------------------------
// Certificates

bool LuhCertificate::complete() const {
    return std::all_of(entries.begin(), entries.end(), [](const RequirementResult& r) { return r.met; });
}

std::vector<RequirementResult> LuhCertificate::unmet() const {
    std::vector<RequirementResult> out;
    for (const auto& e : entries)
        if (!e.met) out.push_back(e);
    return out;
}

LuhCertificate certify(const ComplexPoly& h, const LuhTask& task, const std::vector<Placement>& placements,
                       const std::vector<Requirement>& requirements, int density_factor) {
    if (density_factor < 1) throw std::invalid_argument("density factor must be positive");
    std::map<int, ComplexPoly> hj;
    for (int j : task.orders) hj.emplace(j, j >= 0 ? holo::derivative(h, j) : holo::antiderivative(h, -j));

    LuhCertificate cert;
    cert.entries.resize(requirements.size());
    parallel_for(requirements.size(), [&](std::size_t i) {
        const Requirement& r = requirements[i];
        RequirementResult res;
        res.requirement = r;
        res.error = kInf;
        const auto& K0 = task.compacts[static_cast<std::size_t>(r.compact)];
        const CompactSet K = K0.with_density(K0.boundary_samples() * density_factor);
        const ComplexPoly& f = task.targets[static_cast<std::size_t>(r.target)];
        const ComplexPoly& hp = hj.at(r.order);
        for (const auto& p : placements) {
            if (p.target != r.target || p.order != r.order) continue;
            const SelfMap ps = maps::iterate(task.phi, p.index);
            double err = 0.0;
            for (auto z : K.samples()) err = std::max(err, std::abs(hp(ps(z)) - f(z)));
            if (!res.covered || err < res.error) {
                res.covered = true;
                res.error = err;
                res.stage = p.stage;
                res.witness = p.index;
            }
        }
        res.met = res.covered && res.error < 3.0 * r.eps;
        cert.entries[i] = res;
    });
    return cert;
}

LuhRun run_luh(const LuhTask& task, const DiskChain& schedule, int stage_budget) {
    if (stage_budget < 1) throw std::invalid_argument("stage budget must be positive");
    LuhStageState state = initial_state(task, schedule);
    const auto reqs = enumerate_requirements(task);

    // Plan every stage first so each fit sees the complete layout; a stage's increment is
    // then fitted to vanish on all other placements, including later ones.
    std::vector<StagePlan> plans;
    std::set<std::pair<int, int>> planned;
    for (const auto& r : reqs) {
        if (planned.count({r.target, r.order})) continue;
        if (static_cast<int>(plans.size()) >= stage_budget) break;
        StagePlan plan = plan_stage(state, task, r);
        state = with_plan(state, plan);
        for (const auto& p : plan.placements) planned.insert({p.target, p.order});
        plans.push_back(std::move(plan));
    }
    for (const auto& plan : plans) state = build_stage(state, plan, task);

    LuhRun run;
    run.h = state.h_partial;
    run.certificate = certify(run.h, task, state.placements, reqs, 1);
    run.certificate.stages_run = state.stage;
    const auto dense = certify(run.h, task, state.placements, reqs, task.params.verify_factor);
    for (std::size_t i = 0; i < reqs.size(); ++i) {
        auto& e = run.certificate.entries[i];
        if (!e.covered) continue;
        e.dense_error = dense.entries[i].error;
        e.met = e.met && *e.dense_error < 3.0 * e.requirement.eps;
    }
    run.state = std::move(state);
    return run;
}

// ---------------------------------------------------------------------------
// Dense approximation

DenseApprox dense_approx(const ComplexPoly& f0, const ComplexPoly& g, const PlanarDomain& dom, double eps, int N) {
    require_positive(eps, "epsilon");
    const auto sups = holo::exhaustion_sups(holo::as_evaluable(f0), dom, N);
    auto metric = [&](double delta) {
        std::vector<double> s(sups.size());
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = delta * sups[i];
        return holo::frechet_from_sups(s);
    };
    DenseApprox out;
    out.truncation_bound = std::ldexp(1.0, -N);
    double delta = 1.0;
    if (metric(1.0) >= eps / 2.0) {
        // Bisection on log(delta); the metric is increasing in delta.
        double lo = -700.0, hi = 0.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (metric(std::exp(mid)) < eps / 2.0) lo = mid;
            else hi = mid;
        }
        delta = std::exp(lo);
    }
    for (;;) {
        out.delta = delta;
        out.d_delta_f0 = metric(delta);
        out.f = f0 * delta;
        out.f += g;
        out.d_f_g = holo::frechet_distance(holo::as_evaluable(out.f), holo::as_evaluable(g), dom, N).value;
        if (out.d_f_g < eps || delta < 1e-300) break;
        delta *= 0.5;  // representation error of g in f0's basis; shrink until measured
    }
    return out;
}

}  // namespace lindyn::luh

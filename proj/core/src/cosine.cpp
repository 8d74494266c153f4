#include "lindyn/cosine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "lindyn/parallel.hpp"

namespace lindyn::cosine {

namespace {

std::int64_t grid_index_ceil(double x, int m) {
    const double s = x * m;
    const double r = std::round(s);
    if (std::abs(s - r) < 1e-9) return static_cast<std::int64_t>(r);
    return static_cast<std::int64_t>(std::ceil(s));
}

void require_same_grid(const GridFunction& a, const GridFunction& b) {
    if (a.cells_per_unit() != b.cells_per_unit()) throw std::invalid_argument("grid functions live on different grids");
}

CellSet set_difference(const CellSet& a, const CellSet& b) {
    CellSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

CellSet set_union(const CellSet& a, const CellSet& b) {
    CellSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

CellSet normalized(CellSet s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// GridFunction

GridFunction::GridFunction(int cells_per_unit) : m_(cells_per_unit) {
    if (m_ < 1) throw std::invalid_argument("cells per unit must be a positive integer");
}

GridFunction::GridFunction(int cells_per_unit, std::int64_t start, std::vector<double> values)
    : m_(cells_per_unit), start_(start), values_(std::move(values)) {
    if (m_ < 1) throw std::invalid_argument("cells per unit must be a positive integer");
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("grid function samples must be finite");
}

GridFunction GridFunction::indicator(double a, double b, int m) {
    const std::int64_t lo = grid_index_ceil(a, m), hi = grid_index_ceil(b, m);
    if (hi <= lo) return GridFunction(m);
    return GridFunction(m, lo, std::vector<double>(static_cast<std::size_t>(hi - lo), 1.0));
}

GridFunction GridFunction::unit_mass(double t, int m) {
    return GridFunction(m, grid_index_ceil(t, m), {1.0});
}

double GridFunction::at_index(std::int64_t index) const {
    if (index < start_ || index >= end()) return 0.0;
    return values_[static_cast<std::size_t>(index - start_)];
}

double GridFunction::at(double t) const {
    return at_index(static_cast<std::int64_t>(std::floor(t * m_ + 1e-9)));
}

std::vector<std::int64_t> GridFunction::support() const {
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (values_[i] != 0.0) out.push_back(start_ + static_cast<std::int64_t>(i));
    return out;
}

GridFunction GridFunction::trimmed() const {
    std::size_t lo = 0, hi = values_.size();
    while (lo < hi && values_[lo] == 0.0) ++lo;
    while (hi > lo && values_[hi - 1] == 0.0) --hi;
    if (lo == hi) return GridFunction(m_);
    return GridFunction(m_, start_ + static_cast<std::int64_t>(lo),
                        std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(lo),
                                            values_.begin() + static_cast<std::ptrdiff_t>(hi)));
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    require_same_grid(*this, o);
    if (o.values_.empty()) return *this;
    if (values_.empty()) return *this = o;
    const std::int64_t lo = std::min(start_, o.start_), hi = std::max(end(), o.end());
    std::vector<double> v(static_cast<std::size_t>(hi - lo), 0.0);
    for (std::int64_t i = start_; i < end(); ++i) v[static_cast<std::size_t>(i - lo)] = at_index(i);
    for (std::int64_t i = o.start_; i < o.end(); ++i) v[static_cast<std::size_t>(i - lo)] += o.at_index(i);
    start_ = lo;
    values_ = std::move(v);
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) { return *this += o * -1.0; }

GridFunction& GridFunction::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

bool GridFunction::operator==(const GridFunction& o) const {
    const GridFunction a = trimmed(), b = o.trimmed();
    return a.m_ == b.m_ && a.values_ == b.values_ && (a.values_.empty() || a.start_ == b.start_);
}

// ---------------------------------------------------------------------------
// Weight

Weight Weight::constant(double c) { return piecewise_linear({0.0}, {c}); }

Weight Weight::piecewise_linear(std::vector<double> knots, std::vector<double> values) {
    if (knots.empty() || knots.size() != values.size())
        throw std::invalid_argument("weight needs matching, nonempty knot and value lists");
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (!std::isfinite(knots[i])) throw std::invalid_argument("weight knots must be finite");
        if (!(values[i] > 0.0) || !std::isfinite(values[i]))
            throw std::invalid_argument("weight values must be positive and finite");
        if (i > 0 && knots[i] < knots[i - 1]) throw std::invalid_argument("weight knots must be nondecreasing");
        if (i > 1 && knots[i] == knots[i - 2]) throw std::invalid_argument("a knot may repeat at most twice");
    }
    Weight w;
    w.knots_ = std::move(knots);
    w.values_ = std::move(values);
    w.w_min_ = *std::min_element(w.values_.begin(), w.values_.end());
    w.w_max_ = *std::max_element(w.values_.begin(), w.values_.end());
    return w;
}

double Weight::operator()(double t) const {
    if (t < knots_.front()) return values_.front();
    if (t >= knots_.back()) return values_.back();
    const auto i = static_cast<std::size_t>(std::upper_bound(knots_.begin(), knots_.end(), t) - knots_.begin()) - 1;
    const double s = (t - knots_[i]) / (knots_[i + 1] - knots_[i]);
    return values_[i] + s * (values_[i + 1] - values_[i]);
}

double Weight::left_limit(double t) const {
    if (t <= knots_.front()) return values_.front();
    if (t > knots_.back()) return values_.back();
    const auto i = static_cast<std::size_t>(std::lower_bound(knots_.begin(), knots_.end(), t) - knots_.begin()) - 1;
    const double s = (t - knots_[i]) / (knots_[i + 1] - knots_[i]);
    return values_[i] + s * (values_[i + 1] - values_[i]);
}

Weight example_weight(double M, double delta) {
    if (!(delta >= 1.0) || !(M >= 2.0 + 2.0 * delta))
        throw std::invalid_argument("example weight requires delta >= 1 and M >= 2 + 2*delta (got M = " +
                                    std::to_string(M) + ", delta = " + std::to_string(delta) + ")");
    return Weight::piecewise_linear({-1.0, 1.0}, {M, 1.0 + delta});
}

// ---------------------------------------------------------------------------
// Operators

GridFunction apply_T(const GridFunction& f, const Weight& w) { return power_T(f, w, 1); }
GridFunction apply_S(const GridFunction& f, const Weight& w) { return power_S(f, w, 1); }

GridFunction power_T(const GridFunction& f, const Weight& w, int n) {
    if (n < 0) throw std::invalid_argument("power must be nonnegative");
    const int m = f.cells_per_unit();
    const std::int64_t shift = static_cast<std::int64_t>(n) * m;
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::int64_t idx = f.start() + static_cast<std::int64_t>(i) + shift;
        double p = f.values()[i];
        for (int j = 0; j < n; ++j) p *= w(static_cast<double>(idx - static_cast<std::int64_t>(j) * m) / m);
        if (!std::isfinite(p)) throw std::overflow_error("T^n product overflows at n = " + std::to_string(n));
        v[i] = p;
    }
    return GridFunction(m, f.start() + shift, std::move(v));
}

GridFunction power_S(const GridFunction& f, const Weight& w, int n) {
    if (n < 0) throw std::invalid_argument("power must be nonnegative");
    const int m = f.cells_per_unit();
    const std::int64_t shift = static_cast<std::int64_t>(n) * m;
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::int64_t idx = f.start() + static_cast<std::int64_t>(i) - shift;
        double d = 1.0;
        for (int j = 1; j <= n; ++j) d *= w(static_cast<double>(idx + static_cast<std::int64_t>(j) * m) / m);
        const double p = f.values()[i] / d;
        if (!std::isfinite(p) || !std::isfinite(d))
            throw std::overflow_error("S^n product overflows at n = " + std::to_string(n));
        v[i] = p;
    }
    return GridFunction(m, f.start() - shift, std::move(v));
}

GridFunction cosine_step(const GridFunction& f, const Weight& w, int n) {
    return (power_T(f, w, n) + power_S(f, w, n)) * 0.5;
}

// ---------------------------------------------------------------------------
// Norms

NormSpec NormSpec::lp(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("Lp norm needs 1 <= p < inf");
    return {Kind::Lp, p, Young::Power};
}
NormSpec NormSpec::sup() { return {Kind::Sup, 1.0, Young::Power}; }
NormSpec NormSpec::orlicz_power(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("Orlicz power needs 1 <= p < inf");
    return {Kind::Orlicz, p, Young::Power};
}
NormSpec NormSpec::orlicz_exp() { return {Kind::Orlicz, 1.0, Young::Exp}; }

std::string NormSpec::name() const {
    char buf[64];
    switch (kind) {
        case Kind::Lp: std::snprintf(buf, sizeof buf, "L%g", p); return buf;
        case Kind::Sup: return "sup";
        case Kind::Orlicz:
            if (young == Young::Exp) return "orlicz(exp(t)-1)";
            std::snprintf(buf, sizeof buf, "orlicz(t^%g)", p);
            return buf;
    }
    return "?";
}

namespace {

// Smallest double lambda with sum Phi(|f| / lambda) h <= 1.  Floating-point rounding is
// monotone, so the predicate is monotone in lambda and in |f|; bisecting on the bit
// pattern then gives a result that is exactly solid and exactly translation invariant.
double luxemburg(const std::vector<double>& vals, double h, const NormSpec& spec) {
    double fmax = 0.0;
    for (double v : vals) fmax = std::max(fmax, std::abs(v));
    if (fmax == 0.0) return 0.0;
    auto phi = [&](double t) { return spec.young == NormSpec::Young::Exp ? std::expm1(t) : std::pow(t, spec.p); };
    auto ok = [&](double lambda) {
        double s = 0.0;
        for (double v : vals) s += phi(std::abs(v) / lambda);
        return s * h <= 1.0;
    };
    double hi = fmax;
    while (!ok(hi)) {
        hi *= 2.0;
        if (!std::isfinite(hi)) throw std::overflow_error("Luxemburg norm overflows");
    }
    double lo = hi;
    while (ok(lo)) lo *= 0.5;
    auto lb = std::bit_cast<std::uint64_t>(lo), hb = std::bit_cast<std::uint64_t>(hi);
    while (hb - lb > 1) {
        const std::uint64_t mid = lb + (hb - lb) / 2;
        if (ok(std::bit_cast<double>(mid))) hb = mid;
        else lb = mid;
    }
    return std::bit_cast<double>(hb);
}

}  // namespace

double norm(const GridFunction& f, const NormSpec& spec) {
    const auto& vals = f.values();
    switch (spec.kind) {
        case NormSpec::Kind::Sup: {
            double s = 0.0;
            for (double v : vals) s = std::max(s, std::abs(v));
            return s;
        }
        case NormSpec::Kind::Lp: {
            double s = 0.0;
            if (spec.p == 1.0) {
                for (double v : vals) s += std::abs(v);
                return s * f.h();
            }
            if (spec.p == 2.0) {
                for (double v : vals) s += v * v;
                return std::sqrt(s * f.h());
            }
            for (double v : vals) s += std::pow(std::abs(v), spec.p);
            return std::pow(s * f.h(), 1.0 / spec.p);
        }
        case NormSpec::Kind::Orlicz:
            return luxemburg(vals, f.h(), spec);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Weight products

double log_weight_product(const Weight& w, double x, int n, Direction dir) {
    if (n < 0) throw std::invalid_argument("product length must be nonnegative");
    double s = 0.0;
    if (dir == Direction::Backward)
        for (int j = 1; j <= n; ++j) s += std::log(w(x + j));
    else
        for (int j = 0; j < n; ++j) s -= std::log(w(x - j));
    return s;
}

double weight_product(const Weight& w, double x, int n, Direction dir) {
    return std::exp(log_weight_product(w, x, n, dir));
}

namespace {

struct PieceEnd {
    double value;  // log product using one-sided limits
    double slope;  // one-sided derivative of the log product
};

// One-sided value and slope of the log product at x; side = +1 right, -1 left.
PieceEnd log_product_side(const Weight& w, double x, int n, Direction dir, int side) {
    const auto& k = w.knots();
    const auto& v = w.values();
    PieceEnd out{0.0, 0.0};
    auto add = [&](double t, double sign) {
        const double val = side > 0 ? w(t) : w.left_limit(t);
        double slope = 0.0;
        if (k.size() > 1) {
            std::size_t i;
            bool inside;
            if (side > 0) {
                inside = t >= k.front() && t < k.back();
                i = inside ? static_cast<std::size_t>(std::upper_bound(k.begin(), k.end(), t) - k.begin()) - 1 : 0;
            } else {
                inside = t > k.front() && t <= k.back();
                i = inside ? static_cast<std::size_t>(std::lower_bound(k.begin(), k.end(), t) - k.begin()) - 1 : 0;
            }
            if (inside) slope = (v[i + 1] - v[i]) / (k[i + 1] - k[i]);
        }
        out.value += sign * std::log(val);
        out.slope += sign * slope / val;
    };
    if (dir == Direction::Backward)
        for (int j = 1; j <= n; ++j) add(x + j, 1.0);
    else
        for (int j = 0; j < n; ++j) add(x - j, -1.0);
    return out;
}

}  // namespace

double cell_sup_product(const Weight& w, std::int64_t cell, int m, int n, Direction dir) {
    const double x0 = static_cast<double>(cell) / m, x1 = static_cast<double>(cell + 1) / m;
    std::vector<double> cuts{x0, x1};
    for (double kn : w.knots()) {
        if (dir == Direction::Backward) {
            for (int j = 1; j <= n; ++j)
                if (kn - j > x0 && kn - j < x1) cuts.push_back(kn - j);
        } else {
            for (int j = 0; j < n; ++j)
                if (kn + j > x0 && kn + j < x1) cuts.push_back(kn + j);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double p = cuts[c], q = cuts[c + 1];
        const PieceEnd a = log_product_side(w, p, n, dir, +1);
        const PieceEnd b = log_product_side(w, q, n, dir, -1);
        best = std::max({best, a.value, b.value});
        // Each log(affine) piece is concave, so the backward log product is concave on the
        // piece and an interior maximum shows up as a sign change of the slope.  The
        // forward-inverse log product is convex and peaks at an end.
        if (dir == Direction::Backward && a.slope > 0.0 && b.slope < 0.0) {
            double lo = p, hi = q;
            const double g = 0.5 * (std::sqrt(5.0) - 1.0);
            for (int it = 0; it < 100 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
                const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
                if (log_weight_product(w, m1, n, dir) < log_weight_product(w, m2, n, dir)) lo = m1;
                else hi = m2;
            }
            best = std::max(best, log_weight_product(w, 0.5 * (lo + hi), n, dir));
        }
    }
    return std::exp(best);
}

// ---------------------------------------------------------------------------
// Partitions

CellSet GridInterval::cells(int m) const {
    if (!(b > a)) throw std::invalid_argument("compact interval needs a < b");
    CellSet out;
    for (std::int64_t i = grid_index_ceil(a, m), e = grid_index_ceil(b, m); i < e; ++i) out.push_back(i);
    return out;
}

CellSet cells_of(const IntervalSet& s, int m) {
    CellSet out;
    for (const auto& [a, b] : s)
        for (std::int64_t i = grid_index_ceil(a, m), e = grid_index_ceil(b, m); i < e; ++i) out.push_back(i);
    return normalized(std::move(out));
}

GridFunction restrict_to(const GridFunction& f, const CellSet& cells) {
    std::vector<double> v(f.size(), 0.0);
    for (auto c : cells)
        if (c >= f.start() && c < f.end()) v[static_cast<std::size_t>(c - f.start())] = f.at_index(c);
    return GridFunction(f.cells_per_unit(), f.start(), std::move(v)).trimmed();
}

GridFunction indicator_of(const CellSet& cells, int m) {
    if (cells.empty()) return GridFunction(m);
    const std::int64_t lo = cells.front(), hi = cells.back() + 1;
    std::vector<double> v(static_cast<std::size_t>(hi - lo), 0.0);
    for (auto c : cells) v[static_cast<std::size_t>(c - lo)] = 1.0;
    return GridFunction(m, lo, std::move(v));
}

PartitionScheme PartitionScheme::whole() { return PartitionScheme{}; }

PartitionScheme PartitionScheme::threshold() {
    PartitionScheme s;
    s.kind_ = Kind::Threshold;
    return s;
}

PartitionScheme PartitionScheme::explicit_sets(std::vector<Sets> table) {
    if (table.empty()) throw std::invalid_argument("explicit partition needs at least one entry");
    PartitionScheme s;
    s.kind_ = Kind::Explicit;
    s.table_ = std::move(table);
    return s;
}

Partition PartitionScheme::at(int k, int n, const CellSet& K, const Weight& w, int m) const {
    Partition p;
    switch (kind_) {
        case Kind::Whole:
            p.E = K;
            p.F = K;
            break;
        case Kind::Threshold:
            for (auto c : K) {
                const double x = static_cast<double>(c) / m;
                const double back = log_weight_product(w, x, 2 * n, Direction::Backward);
                const double fwd = log_weight_product(w, x, 2 * n, Direction::ForwardInverse);
                (back <= fwd ? p.D : p.F).push_back(c);
            }
            p.E = K;
            break;
        case Kind::Explicit: {
            const auto& s = table_[static_cast<std::size_t>(std::clamp<int>(k, 1, static_cast<int>(table_.size()))) - 1];
            p.E = cells_of(s.E, m);
            p.D = cells_of(s.D, m);
            p.F = cells_of(s.F, m);
            break;
        }
    }
    CellSet inter;
    std::set_intersection(p.D.begin(), p.D.end(), p.F.begin(), p.F.end(), std::back_inserter(inter));
    if (!inter.empty()) throw std::invalid_argument("partition: D and F overlap at k = " + std::to_string(k));
    if (set_union(p.D, p.F) != p.E) throw std::invalid_argument("partition: E differs from D u F at k = " + std::to_string(k));
    if (!set_difference(p.E, K).empty()) throw std::invalid_argument("partition: E leaves K at k = " + std::to_string(k));
    return p;
}

// ---------------------------------------------------------------------------
// Condition checker

const std::array<std::string, kConditionSequences>& ConditionReport::names() {
    static const std::array<std::string, kConditionSequences> n{
        "chi_K_minus_E",   "sup_D_back_2n",     "sup_F_fwdinv_2n",   "sup_E_back_x_sup_D_back",
        "sup_E_back_x_sup_F_fwdinv", "sup_E_fwdinv_x_sup_D_back", "sup_E_fwdinv_x_sup_F_fwdinv"};
    return n;
}

bool sequence_passes(const std::vector<double>& s, double tau) {
    if (s.empty() || !(s.back() < tau)) return false;
    const std::size_t from = s.size() > static_cast<std::size_t>(kVerdictWindow) ? s.size() - kVerdictWindow : 0;
    for (std::size_t i = from + 1; i < s.size(); ++i)
        if (s[i] > s[i - 1]) return false;
    return true;
}

ConditionReport check_conditions(const Weight& w, const GridInterval& K, const PartitionScheme& scheme,
                                 const std::vector<int>& n_seq, const NormSpec& spec, double tau, int m) {
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    if (n_seq.empty()) throw std::invalid_argument("n sequence must be nonempty");
    for (std::size_t i = 0; i < n_seq.size(); ++i) {
        if (n_seq[i] < 1) throw std::invalid_argument("n sequence entries must be positive");
        if (i > 0 && n_seq[i] <= n_seq[i - 1]) throw std::invalid_argument("n sequence must be strictly increasing");
    }
    const CellSet Kc = K.cells(m);
    const std::size_t nk = n_seq.size();
    ConditionReport rep;
    rep.tau = tau;
    for (auto& s : rep.seq) s.assign(nk, 0.0);
    rep.one_sided_backward.assign(nk, 0.0);
    rep.one_sided_forward_inverse.assign(nk, 0.0);
    for (std::size_t i = 0; i < nk; ++i) {
        rep.k.push_back(static_cast<int>(i) + 1);
        rep.n.push_back(n_seq[i]);
    }

    parallel_for(nk, [&](std::size_t i) {
        const int k = static_cast<int>(i) + 1, n = n_seq[i];
        const Partition part = scheme.at(k, n, Kc, w, m);
        auto sup_over = [&](const CellSet& cells, int len, Direction dir) {
            double s = 0.0;  // empty set contributes 0
            for (auto c : cells) s = std::max(s, cell_sup_product(w, c, m, len, dir));
            return s;
        };
        const double eb = sup_over(part.E, n, Direction::Backward);
        const double ef = sup_over(part.E, n, Direction::ForwardInverse);
        const double db = sup_over(part.D, n, Direction::Backward);
        const double ff = sup_over(part.F, n, Direction::ForwardInverse);
        rep.seq[0][i] = norm(indicator_of(set_difference(Kc, part.E), m), spec);
        rep.seq[1][i] = sup_over(part.D, 2 * n, Direction::Backward);
        rep.seq[2][i] = sup_over(part.F, 2 * n, Direction::ForwardInverse);
        rep.seq[3][i] = eb * db;
        rep.seq[4][i] = eb * ff;
        rep.seq[5][i] = ef * db;
        rep.seq[6][i] = ef * ff;
        rep.one_sided_backward[i] = sup_over(Kc, n, Direction::Backward);
        rep.one_sided_forward_inverse[i] = sup_over(Kc, n, Direction::ForwardInverse);
    });

    rep.pass = true;
    for (int s = 0; s < kConditionSequences; ++s) {
        rep.seq_pass[static_cast<std::size_t>(s)] = sequence_passes(rep.seq[static_cast<std::size_t>(s)], tau);
        rep.pass = rep.pass && rep.seq_pass[static_cast<std::size_t>(s)];
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Witness

Witness build_v(const GridFunction& f, const GridFunction& g, const CellSet& E, const CellSet& D, const CellSet& F,
                int n, const Weight& w, const NormSpec& spec) {
    require_same_grid(f, g);
    if (n < 1) throw std::invalid_argument("n must be positive");
    const GridFunction fE = restrict_to(f, E);
    const GridFunction gD = restrict_to(g, D), gF = restrict_to(g, F);
    const GridFunction TgD = power_T(gD, w, n), SgF = power_S(gF, w, n);
    Witness out;
    out.A = norm(power_T(fE, w, n), spec) + norm(power_S(fE, w, n), spec);
    out.B = norm(TgD, spec) + norm(SgF, spec);
    if (!(out.A > 0.0)) throw DegeneratePartition("f vanishes on E: ||T^n(f chi_E)|| + ||S^n(f chi_E)|| = 0");
    if (!(out.B > 0.0)) throw DegeneratePartition("g vanishes on D and F: ||T^n(g chi_D)|| + ||S^n(g chi_F)|| = 0");
    const double rA = std::sqrt(out.A), rB = std::sqrt(out.B);
    out.v = fE + (TgD + SgF) * (2.0 * rA / rB);
    out.lambda = rB / rA;
    return out;
}

DemoReport supercyclicity_demo(const GridFunction& f, const GridFunction& g, const Weight& w,
                               const PartitionScheme& scheme, const std::vector<int>& n_seq, const NormSpec& spec,
                               double tol) {
    require_same_grid(f, g);
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (n_seq.empty()) throw std::invalid_argument("n sequence must be nonempty");
    for (std::size_t i = 0; i < n_seq.size(); ++i) {
        if (n_seq[i] < 1) throw std::invalid_argument("n sequence entries must be positive");
        if (i > 0 && n_seq[i] <= n_seq[i - 1]) throw std::invalid_argument("n sequence must be strictly increasing");
    }
    const int m = f.cells_per_unit();
    const CellSet K = set_union(normalized(f.support()), normalized(g.support()));
    if (f.support().empty() || g.support().empty()) throw std::invalid_argument("f and g must be nonzero");

    const std::size_t nk = n_seq.size();
    std::vector<std::optional<DemoRow>> rows(nk);
    std::vector<std::string> reasons(nk);
    parallel_for(nk, [&](std::size_t i) {
        const int k = static_cast<int>(i) + 1, n = n_seq[i];
        try {
            const Partition p = scheme.at(k, n, K, w, m);
            const Witness wit = build_v(f, g, p.E, p.D, p.F, n, w, spec);
            DemoRow r;
            r.k = k;
            r.n = n;
            r.lambda = wit.lambda;
            r.a = norm(wit.v - f, spec);
            r.b = norm(cosine_step(wit.v, w, n) * wit.lambda - g, spec);
            rows[i] = r;
        } catch (const DegeneratePartition& e) {
            reasons[i] = e.what();
        } catch (const std::overflow_error& e) {
            reasons[i] = e.what();
        }
    });

    DemoReport rep;
    rep.tol = tol;
    for (std::size_t i = 0; i < nk; ++i) {
        if (!rows[i]) {
            rep.skipped.push_back({static_cast<int>(i) + 1, reasons[i]});
            continue;
        }
        const DemoRow& r = *rows[i];
        rep.rows.push_back(r);
        if (!rep.hit && r.a < tol && r.b < tol) {
            rep.hit = true;
            rep.k0 = r.k;
            rep.best = r;
        }
        if (!rep.hit && (!rep.best || std::max(r.a, r.b) < std::max(rep.best->a, rep.best->b))) rep.best = r;
    }
    return rep;
}

}  // namespace lindyn::cosine

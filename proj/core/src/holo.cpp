#include "lindyn/holo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lindyn::holo {

namespace {

void trim(std::vector<cplx>& c) {
    while (!c.empty() && c.back() == cplx{}) c.pop_back();
}

cplx clenshaw(const std::vector<cplx>& c, cplx u) {
    cplx b1{}, b2{};
    for (std::size_t k = c.size(); k-- > 1;) {
        cplx b0 = c[k] + 2.0 * u * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    if (c.empty()) return {};
    return c[0] + u * b1 - b2;
}

cplx cheb_u(const ChebyshevBasis& cb, cplx z) { return (2.0 * z - cb.a - cb.b) / (cb.b - cb.a); }

// Multiply a monomial coefficient vector by (z - r) in place.
void mul_linear(std::vector<cplx>& q, cplx r) {
    q.push_back({});
    for (std::size_t k = q.size() - 1; k > 0; --k) q[k] = q[k - 1] - r * q[k];
    q[0] = -r * q[0];
}

ComplexPoly derivative_once(const ComplexPoly& p) {
    const auto& c = p.coeffs();
    if (c.size() <= 1) return ComplexPoly({}, p.basis());
    std::vector<cplx> d(c.size() - 1);
    if (auto pb = std::get_if<PowerBasis>(&p.basis())) {
        for (std::size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k] / pb->scale;
    } else {
        const auto& cb = std::get<ChebyshevBasis>(p.basis());
        const std::size_t n = c.size() - 1;
        std::vector<cplx> w(n + 2, cplx{});
        for (std::size_t k = n; k >= 1; --k) w[k - 1] = w[k + 1] + 2.0 * static_cast<double>(k) * c[k];
        w[0] *= 0.5;
        const cplx f = 2.0 / (cb.b - cb.a);
        for (std::size_t k = 0; k < n; ++k) d[k] = w[k] * f;
    }
    return ComplexPoly(std::move(d), p.basis());
}

ComplexPoly antiderivative_once(const ComplexPoly& p) {
    const auto& c = p.coeffs();
    if (c.empty()) return p;
    std::vector<cplx> F(c.size() + 1, cplx{});
    if (auto pb = std::get_if<PowerBasis>(&p.basis())) {
        for (std::size_t k = 0; k < c.size(); ++k) F[k + 1] = c[k] * pb->scale / static_cast<double>(k + 1);
    } else {
        const auto& cb = std::get<ChebyshevBasis>(p.basis());
        const std::size_t n = c.size();
        F[1] = c[0];
        if (n > 1) F[2] = c[1] / 4.0;
        for (std::size_t j = 2; j < n; ++j) {
            F[j + 1] = c[j] / (2.0 * static_cast<double>(j + 1));
            F[j - 1] -= c[j] / (2.0 * static_cast<double>(j - 1));
        }
        const cplx h = (cb.b - cb.a) / 2.0;
        for (auto& v : F) v *= h;
    }
    ComplexPoly out(std::move(F), p.basis());
    if (!out.is_standard()) {
        // Pin the value at the origin; constants are c_0 in both bases.
        std::vector<cplx> adj = out.coeffs();
        adj[0] -= out(cplx{});
        out = ComplexPoly(std::move(adj), p.basis());
    }
    return out;
}

// cos(pi * j / (2N)) for j in [0, 4N).
std::vector<double> quarter_cos_table(int N) {
    std::vector<double> t(static_cast<std::size_t>(4 * N));
    for (int j = 0; j < 4 * N; ++j) t[j] = std::cos(std::numbers::pi * j / (2.0 * N));
    return t;
}

}  // namespace

ComplexPoly::ComplexPoly(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {}

ComplexPoly::ComplexPoly(std::vector<cplx> coeffs, Basis basis) : coeffs_(std::move(coeffs)), basis_(basis) {
    if (auto pb = std::get_if<PowerBasis>(&basis_); pb && pb->scale == cplx{})
        throw std::invalid_argument("power basis scale must be nonzero");
    if (auto cb = std::get_if<ChebyshevBasis>(&basis_); cb && cb->a == cb->b)
        throw std::invalid_argument("chebyshev segment must be nondegenerate");
}

ComplexPoly ComplexPoly::constant(cplx c) { return ComplexPoly(std::vector<cplx>{c}); }

ComplexPoly ComplexPoly::monomial(int k, cplx c) {
    if (k < 0) throw std::invalid_argument("monomial degree must be nonnegative");
    std::vector<cplx> v(static_cast<std::size_t>(k) + 1, cplx{});
    v.back() = c;
    return ComplexPoly(std::move(v));
}

bool ComplexPoly::is_standard() const {
    auto pb = std::get_if<PowerBasis>(&basis_);
    return pb && *pb == PowerBasis{};
}

int ComplexPoly::degree() const {
    for (std::size_t k = coeffs_.size(); k-- > 0;)
        if (coeffs_[k] != cplx{}) return static_cast<int>(k);
    return kZeroDegree;
}

cplx ComplexPoly::operator()(cplx z) const {
    if (auto pb = std::get_if<PowerBasis>(&basis_)) {
        if (*pb == PowerBasis{}) return horner(coeffs_, z);
        return horner(coeffs_, (z - pb->center) / pb->scale);
    }
    return clenshaw(coeffs_, cheb_u(std::get<ChebyshevBasis>(basis_), z));
}

ComplexPoly ComplexPoly::operator-() const {
    ComplexPoly out = *this;
    for (auto& c : out.coeffs_) c = -c;
    return out;
}

ComplexPoly& ComplexPoly::operator+=(const ComplexPoly& other) {
    if (other.coeffs_.empty()) return *this;
    if (coeffs_.empty() && is_standard()) return *this = other;
    const ComplexPoly rhs = other.basis_ == basis_ ? other : rebase(other, basis_);
    if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), cplx{});
    for (std::size_t k = 0; k < rhs.coeffs_.size(); ++k) coeffs_[k] += rhs.coeffs_[k];
    return *this;
}

ComplexPoly& ComplexPoly::operator-=(const ComplexPoly& other) { return *this += -other; }

ComplexPoly& ComplexPoly::operator*=(cplx s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

bool ComplexPoly::operator==(const ComplexPoly& other) const {
    if (!(basis_ == other.basis_)) return false;
    auto a = coeffs_, b = other.coeffs_;
    trim(a);
    trim(b);
    return a == b;
}

cplx horner(const std::vector<cplx>& coeffs, cplx z) {
    cplx acc{};
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * z + coeffs[k];
    return acc;
}

cplx eval(const ComplexPoly& p, cplx z) { return p(z); }

ComplexPoly derivative(const ComplexPoly& p, int j) {
    if (j < 0) throw std::invalid_argument("derivative order must be nonnegative");
    ComplexPoly out = p;
    for (int i = 0; i < j; ++i) out = derivative_once(out);
    return out;
}

ComplexPoly antiderivative(const ComplexPoly& p, int j) {
    if (j < 0) throw std::invalid_argument("antiderivative order must be nonnegative");
    ComplexPoly out = p;
    for (int i = 0; i < j; ++i) out = antiderivative_once(out);
    return out;
}

ComplexPoly compose_affine(const ComplexPoly& p, cplx alpha, cplx beta) {
    if (alpha == cplx{}) throw std::invalid_argument("affine composition needs a nonzero slope");
    if (auto pb = std::get_if<PowerBasis>(&p.basis()))
        return ComplexPoly(p.coeffs(), PowerBasis{(pb->center - beta) / alpha, pb->scale / alpha});
    const auto& cb = std::get<ChebyshevBasis>(p.basis());
    return ComplexPoly(p.coeffs(), ChebyshevBasis{(cb.a - beta) / alpha, (cb.b - beta) / alpha});
}

std::vector<cplx> interpolation_nodes(const Basis& target, int degree) {
    const int N = degree + 1;
    std::vector<cplx> z(static_cast<std::size_t>(std::max(N, 0)));
    if (auto pb = std::get_if<PowerBasis>(&target)) {
        for (int m = 0; m < N; ++m) z[m] = pb->center + pb->scale * std::polar(1.0, 2.0 * std::numbers::pi * m / N);
    } else {
        const auto& cb = std::get<ChebyshevBasis>(target);
        const cplx mid = (cb.a + cb.b) / 2.0, half = (cb.b - cb.a) / 2.0;
        for (int m = 0; m < N; ++m) z[m] = mid + half * std::cos(std::numbers::pi * (m + 0.5) / N);
    }
    return z;
}

ComplexPoly interpolate_values(const std::vector<cplx>& vals, const Basis& target) {
    const int N = static_cast<int>(vals.size());
    std::vector<cplx> c(vals.size(), cplx{});
    if (N == 0) return ComplexPoly({}, target);
    if (std::holds_alternative<PowerBasis>(target)) {
        std::vector<cplx> roots(static_cast<std::size_t>(N));
        for (int j = 0; j < N; ++j) roots[j] = std::polar(1.0, -2.0 * std::numbers::pi * j / N);
        for (int k = 0; k < N; ++k) {
            cplx acc{};
            for (int m = 0; m < N; ++m) acc += vals[m] * roots[(static_cast<long>(k) * m) % N];
            c[k] = acc / static_cast<double>(N);
        }
    } else {
        const auto table = quarter_cos_table(N);
        for (int k = 0; k < N; ++k) {
            cplx acc{};
            for (int m = 0; m < N; ++m) acc += vals[m] * table[(static_cast<long>(k) * (2 * m + 1)) % (4 * N)];
            c[k] = acc * (2.0 / N);
        }
        c[0] *= 0.5;
    }
    return ComplexPoly(std::move(c), target);
}

ComplexPoly interpolate(const Evaluable& f, const Basis& target, int degree) {
    if (degree < 0) return ComplexPoly({}, target);
    auto z = interpolation_nodes(target, degree);
    for (auto& v : z) v = f(v);
    return interpolate_values(z, target);
}

ComplexPoly rebase(const ComplexPoly& p, const Basis& target) {
    if (p.basis() == target) return p;
    const int deg = p.degree();
    if (deg == kZeroDegree) return ComplexPoly({}, target);
    return interpolate([&p](cplx z) { return p(z); }, target, deg);
}

ComplexPoly to_standard(const ComplexPoly& p) {
    if (p.is_standard()) return p;
    PowerBasis pb;
    std::vector<cplx> u;  // monomial coefficients in the basis variable
    if (auto ppb = std::get_if<PowerBasis>(&p.basis())) {
        pb = *ppb;
        u = p.coeffs();
    } else {
        const auto& cb = std::get<ChebyshevBasis>(p.basis());
        pb = PowerBasis{(cb.a + cb.b) / 2.0, (cb.b - cb.a) / 2.0};
        const auto& c = p.coeffs();
        u.assign(c.size(), cplx{});
        std::vector<cplx> tkm1{1.0}, tk{0.0, 1.0};
        if (!c.empty()) u[0] += c[0];
        if (c.size() > 1) u[1] += c[1];
        for (std::size_t k = 2; k < c.size(); ++k) {
            std::vector<cplx> next(k + 1, cplx{});
            for (std::size_t i = 0; i < tk.size(); ++i) next[i + 1] += 2.0 * tk[i];
            for (std::size_t i = 0; i < tkm1.size(); ++i) next[i] -= tkm1[i];
            for (std::size_t i = 0; i <= k; ++i) u[i] += c[k] * next[i];
            tkm1 = std::move(tk);
            tk = std::move(next);
        }
    }
    // u in powers of w = (z - center) / scale; expand with Horner on polynomials.
    std::vector<cplx> d(u.size());
    cplx sk = 1.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        d[k] = u[k] / sk;
        sk *= pb.scale;
    }
    std::vector<cplx> q;
    for (std::size_t k = d.size(); k-- > 0;) {
        if (!q.empty()) mul_linear(q, pb.center);
        if (q.empty()) q.push_back({});
        q[0] += d[k];
    }
    trim(q);
    return ComplexPoly(std::move(q));
}

CompactSet CompactSet::disk(cplx center, double radius, int boundary_samples) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("disk radius must be positive");
    if (boundary_samples < 8) throw std::invalid_argument("a compact set needs at least 8 boundary samples");
    CompactSet K;
    K.kind_ = Kind::Disk;
    K.center_ = center;
    K.radius_ = radius;
    K.boundary_samples_ = boundary_samples;
    const int n = boundary_samples;
    K.samples_.reserve(static_cast<std::size_t>(4 * n + 1));
    // Boundary first, then three interior rings at the same angles, then the center.
    for (double frac : {1.0, 0.75, 0.5, 0.25})
        for (int k = 0; k < n; ++k)
            K.samples_.push_back(center + std::polar(frac * radius, 2.0 * std::numbers::pi * k / n));
    K.samples_.push_back(center);
    return K;
}

CompactSet CompactSet::points(std::vector<cplx> pts) {
    if (pts.size() < 8) throw std::invalid_argument("a compact set needs at least 8 samples");
    CompactSet K;
    K.kind_ = Kind::Points;
    cplx c{};
    for (auto z : pts) c += z;
    c /= static_cast<double>(pts.size());
    double r = 0.0;
    for (auto z : pts) r = std::max(r, std::abs(z - c));
    K.center_ = c;
    K.radius_ = r;
    K.boundary_samples_ = static_cast<int>(pts.size());
    K.samples_ = std::move(pts);
    return K;
}

CompactSet CompactSet::with_density(int boundary_samples) const {
    if (kind_ == Kind::Points) return *this;
    return disk(center_, radius_, boundary_samples);
}

CompactSet CompactSet::enlarged(double by) const {
    if (kind_ == Kind::Points) throw std::invalid_argument("only disks can be enlarged");
    return disk(center_, radius_ + by, boundary_samples_);
}

double sup_norm_on(const Evaluable& f, const CompactSet& K) {
    double m = 0.0;
    for (auto z : K.samples()) m = std::max(m, std::abs(f(z)));
    return m;
}

double sup_norm_on(const ComplexPoly& p, const CompactSet& K) {
    double m = 0.0;
    for (auto z : K.samples()) m = std::max(m, std::abs(p(z)));
    return m;
}

PlanarDomain PlanarDomain::right_half_plane(double offset) {
    if (!std::isfinite(offset)) throw std::invalid_argument("half-plane offset must be finite");
    PlanarDomain d;
    d.kind_ = Kind::RightHalfPlane;
    d.offset_ = offset;
    return d;
}

PlanarDomain PlanarDomain::open_disk(cplx center, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("domain radius must be positive");
    PlanarDomain d;
    d.kind_ = Kind::OpenDisk;
    d.center_ = center;
    d.radius_ = radius;
    return d;
}

double PlanarDomain::boundary_distance(cplx z) const {
    if (kind_ == Kind::RightHalfPlane) return z.real() - offset_;
    return radius_ - std::abs(z - center_);
}

bool PlanarDomain::contains(cplx z, double margin) const { return boundary_distance(z) > margin; }

bool PlanarDomain::contains(const CompactSet& K, double margin) const {
    if (K.kind() == CompactSet::Kind::Disk) {
        if (kind_ == Kind::RightHalfPlane) return K.center().real() - K.radius() - offset_ > margin;
        return radius_ - std::abs(K.center() - center_) - K.radius() > margin;
    }
    return std::all_of(K.samples().begin(), K.samples().end(),
                       [&](cplx z) { return contains(z, margin); });
}

PlanarDomain PlanarDomain::with_exhaustion(std::vector<CompactSet> members) const {
    if (members.empty()) throw std::invalid_argument("exhaustion must have at least one member");
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (!contains(members[i], 0.0))
            throw std::invalid_argument("exhaustion member " + std::to_string(i + 1) + " is not inside the domain");
        if (i == 0) continue;
        const auto& a = members[i - 1];
        const auto& b = members[i];
        const bool nested = std::all_of(a.samples().begin(), a.samples().end(), [&](cplx z) {
            return std::abs(z - b.center()) <= b.radius() + 1e-12;
        });
        if (!nested)
            throw std::invalid_argument("exhaustion members " + std::to_string(i) + " and " + std::to_string(i + 1) +
                                        " are not nested");
    }
    PlanarDomain d = *this;
    d.explicit_ = std::move(members);
    return d;
}

CompactSet PlanarDomain::exhaustion(int n) const {
    if (n < 1) throw std::out_of_range("exhaustion index is 1-based");
    if (!explicit_.empty()) {
        if (static_cast<std::size_t>(n) > explicit_.size())
            throw std::out_of_range("exhaustion has only " + std::to_string(explicit_.size()) + " members");
        return explicit_[static_cast<std::size_t>(n) - 1];
    }
    const double shrink = 1.0 / (n + 1.0);
    if (kind_ == Kind::RightHalfPlane) return CompactSet::disk({offset_ + n, 0.0}, n - shrink);
    return CompactSet::disk(center_, radius_ * (1.0 - shrink));
}

std::optional<int> PlanarDomain::exhaustion_length() const {
    if (explicit_.empty()) return std::nullopt;
    return static_cast<int>(explicit_.size());
}

std::vector<double> exhaustion_sups(const Evaluable& f, const PlanarDomain& dom, int N) {
    if (N < 1) throw std::invalid_argument("metric truncation must be positive");
    std::vector<double> d(static_cast<std::size_t>(N));
    for (int n = 1; n <= N; ++n) d[n - 1] = sup_norm_on(f, dom.exhaustion(n));
    return d;
}

double frechet_from_sups(const std::vector<double>& sups) {
    double acc = 0.0, w = 0.5;
    for (double d : sups) {
        const double t = std::isinf(d) ? 1.0 : d / (1.0 + d);
        acc += w * t;
        w *= 0.5;
    }
    return acc;
}

FrechetDistance frechet_distance(const Evaluable& f, const Evaluable& g, const PlanarDomain& dom, int N) {
    auto diff = [&](cplx z) { return f(z) - g(z); };
    return {frechet_from_sups(exhaustion_sups(diff, dom, N)), std::ldexp(1.0, -N)};
}

Evaluable as_evaluable(const ComplexPoly& p) {
    return [p](cplx z) { return p(z); };
}

}  // namespace lindyn::holo

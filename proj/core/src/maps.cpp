#include "lindyn/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lindyn::maps {

namespace {

using Mat = std::array<cplx, 4>;

Mat matmul(const Mat& x, const Mat& y) {
    Mat r{x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
          x[2] * y[1] + x[3] * y[3]};
    double s = 0.0;
    for (auto v : r) s = std::max(s, std::abs(v));
    if (s > 0.0)
        for (auto& v : r) v /= s;
    return r;
}

cplx ipow(cplx a, std::int64_t n) {
    cplx r{1.0}, base = a;
    while (n > 0) {
        if (n & 1) r *= base;
        base *= base;
        n >>= 1;
    }
    return r;
}

double min_pairwise(const std::vector<cplx>& pts) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) m = std::min(m, std::abs(pts[i] - pts[j]));
    return m;
}

cplx circumcenter(cplx p, cplx q, cplx r) {
    const cplx b = q - p, c = r - p;
    const double d = 2.0 * (b.real() * c.imag() - b.imag() * c.real());
    if (std::abs(d) < 1e-300) throw std::domain_error("collinear points have no circumcircle");
    const double bb = std::norm(b), cc = std::norm(c);
    return p + cplx{(c.imag() * bb - b.imag() * cc) / d, (b.real() * cc - c.real() * bb) / d};
}

}  // namespace

SelfMap SelfMap::affine(cplx a, cplx b) {
    if (a == cplx{}) throw std::invalid_argument("affine map needs a nonzero slope");
    SelfMap m;
    m.kind_ = Kind::Affine;
    m.m_ = {a, b, cplx{}, cplx{1.0}};
    return m;
}

SelfMap SelfMap::moebius(cplx a, cplx b, cplx c, cplx d) {
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    if (!(std::abs(a * d - b * c) > 1e-12 * scale * scale))
        throw std::invalid_argument("moebius map needs |ad - bc| > 1e-12 max|entry|^2");
    SelfMap m;
    m.kind_ = Kind::Moebius;
    m.m_ = {a, b, c, d};
    return m;
}

SelfMap SelfMap::attached_to(const PlanarDomain& dom, int depth) const {
    for (int n = 1; n <= depth; ++n) {
        if (auto len = dom.exhaustion_length(); len && n > *len) break;
        const CompactSet K = dom.exhaustion(n);
        for (auto z : K.samples())
            if (!dom.contains((*this)(z)))
                throw std::invalid_argument("self-map sends exhaustion member " + std::to_string(n) +
                                            " outside the domain");
    }
    SelfMap out = *this;
    out.domain_ = dom;
    return out;
}

cplx SelfMap::operator()(cplx z) const {
    if (kind_ == Kind::Affine) return m_[0] * z + m_[1];
    return (m_[0] * z + m_[1]) / (m_[2] * z + m_[3]);
}

bool SelfMap::is_identity() const {
    if (kind_ == Kind::Affine) return m_[0] == cplx{1.0} && m_[1] == cplx{};
    return m_[1] == cplx{} && m_[2] == cplx{} && m_[0] == m_[3];
}

SelfMap SelfMap::inverse() const {
    if (kind_ != Kind::Affine) throw std::invalid_argument("inverse is provided for affine maps only");
    SelfMap inv = affine(1.0 / m_[0], -m_[1] / m_[0]);
    return inv;
}

SelfMap iterate(const SelfMap& phi, std::int64_t n) {
    if (n < 0) throw std::invalid_argument("iteration count must be nonnegative");
    SelfMap out;
    if (phi.kind() == SelfMap::Kind::Affine) {
        const cplx a = phi.a(), b = phi.b();
        if (n == 0) {
            out = SelfMap::identity();
        } else if (a == cplx{1.0}) {
            out = SelfMap::affine(1.0, static_cast<double>(n) * b);
        } else {
            const double growth = static_cast<double>(n) * std::log(std::abs(a));
            if (growth > 700.0 || growth < -700.0)
                throw std::range_error("affine iterate overflows: |a|^n out of double range");
            const cplx an = ipow(a, n);
            out = SelfMap::affine(an, b * (an - 1.0) / (a - 1.0));
        }
    } else {
        // Powers of a loxodromic matrix approach rank one, which is still a valid map, so the
        // constructor's degeneracy check is bypassed.  Rescaling keeps the entries in range.
        auto rescaled = [](Mat m) {
            double s = 0.0;
            for (auto x : m) s = std::max(s, std::abs(x));
            for (auto& x : m) x /= s;
            return m;
        };
        Mat r{1.0, 0.0, 0.0, 1.0}, base = rescaled(phi.coefficients());
        while (n > 0) {
            if (n & 1) r = rescaled(matmul(r, base));
            base = rescaled(matmul(base, base));
            n >>= 1;
        }
        out.kind_ = SelfMap::Kind::Moebius;
        out.m_ = r;
    }
    if (phi.domain()) out = out.attached_to(*phi.domain(), 0);
    return out;
}

CompactSet image_disk(const SelfMap& phi, const CompactSet& K) {
    if (K.kind() != CompactSet::Kind::Disk) throw std::invalid_argument("image_disk needs a disk");
    if (phi.kind() == SelfMap::Kind::Affine)
        return CompactSet::disk(phi(K.center()), std::abs(phi.a()) * K.radius(), K.boundary_samples());
    if (phi.c() != cplx{}) {
        const cplx pole = -phi.d() / phi.c();
        if (std::abs(pole - K.center()) <= K.radius()) throw std::domain_error("disk contains the pole of the map");
    }
    const cplx p = phi(K.center() + K.radius()), q = phi(K.center() + cplx{0.0, K.radius()}),
               r = phi(K.center() - K.radius());
    const cplx c = circumcenter(p, q, r);
    return CompactSet::disk(c, std::abs(p - c), K.boundary_samples());
}

RunawayOutcome runaway_check(const SelfMap& phi, const CompactSet& K, std::int64_t n, double margin) {
    if (n < 1) throw std::invalid_argument("runaway index must be positive");
    if (!(margin > 0.0)) throw std::invalid_argument("runaway margin must be positive");
    const SelfMap pn = iterate(phi, n);
    const auto& src = K.samples();
    std::vector<cplx> img(src.size());
    std::transform(src.begin(), src.end(), img.begin(), [&](cplx z) { return pn(z); });

    double sep = std::numeric_limits<double>::infinity();
    for (auto x : img)
        for (auto y : src) sep = std::min(sep, std::abs(x - y));

    double inj;
    std::optional<double> lip, exact;
    if (pn.kind() == SelfMap::Kind::Affine) {
        inj = std::abs(pn.a());
        lip = inj;
        if (K.kind() == CompactSet::Kind::Disk)
            exact = std::abs(pn(K.center()) - K.center()) - K.radius() - inj * K.radius();
    } else {
        inj = min_pairwise(img) / min_pairwise(src);
        if (K.kind() == CompactSet::Kind::Disk) {
            try {
                const CompactSet D = image_disk(pn, K);
                if (std::isfinite(D.radius())) exact = std::abs(D.center() - K.center()) - D.radius() - K.radius();
            } catch (const std::exception&) {
                // pole inside or on the disk: no closed form, samples decide
            }
        }
    }

    // Samples alone cannot see an overlap of two disks; the closed-form distance can.
    if (!(sep > margin) || (exact && !(*exact > margin))) {
        return RunawayRefusal{K, n, RunawayRefusal::Reason::Overlap, sep, inj,
                              "image and compact are not separated by more than the margin"};
    }
    if (!(inj > margin)) {
        return RunawayRefusal{K, n, RunawayRefusal::Reason::NotInjective, sep, inj,
                              "iterate is not injective on the compact samples"};
    }
    return RunawayCertificate{K, n, sep, inj, lip, exact};
}

ExhaustedSearch::ExhaustedSearch(int compact_index, std::int64_t n_max)
    : std::runtime_error("no runaway witness up to n = " + std::to_string(n_max) + " for compact " +
                         std::to_string(compact_index)),
      compact_index_(compact_index),
      n_max_(n_max) {}

std::vector<RunawayCertificate> universality_certificate(const SelfMap& phi, const std::vector<CompactSet>& compacts,
                                                         std::int64_t n_max, double margin) {
    if (n_max < 1) throw std::invalid_argument("N_max must be positive");
    std::vector<RunawayCertificate> out;
    for (std::size_t i = 0; i < compacts.size(); ++i) {
        bool found = false;
        for (std::int64_t n = 1; n <= n_max && !found; ++n) {
            auto r = runaway_check(phi, compacts[i], n, margin);
            if (auto c = std::get_if<RunawayCertificate>(&r)) {
                out.push_back(*c);
                found = true;
            }
        }
        if (!found) throw ExhaustedSearch(static_cast<int>(i) + 1, n_max);
    }
    return out;
}

std::vector<RunawayCertificate> universality_certificate(const SelfMap& phi, const PlanarDomain& dom, int depth,
                                                         std::int64_t n_max, double margin) {
    if (depth < 1) throw std::invalid_argument("depth must be positive");
    if (auto len = dom.exhaustion_length(); len && depth > *len)
        throw std::invalid_argument("depth exceeds the exhaustion length");
    std::vector<CompactSet> compacts;
    for (int n = 1; n <= depth; ++n) compacts.push_back(dom.exhaustion(n));
    return universality_certificate(phi, compacts, n_max, margin);
}

OrbitProbeResult orbit_probe(const Evaluable& f, const SelfMap& phi, const Evaluable& g, const CompactSet& K,
                             double eps, std::int64_t n_max, bool projective) {
    if (!(eps > 0.0)) throw std::invalid_argument("probe tolerance must be positive");
    if (n_max < 0) throw std::invalid_argument("N_max must be nonnegative");
    const auto& pts = K.samples();
    std::vector<cplx> gv(pts.size());
    std::transform(pts.begin(), pts.end(), gv.begin(), g);

    OrbitProbeResult best{false, 0, std::numeric_limits<double>::infinity(), 1.0};
    std::vector<cplx> fv(pts.size());
    for (std::int64_t n = 0; n <= n_max; ++n) {
        const SelfMap pn = iterate(phi, n);
        for (std::size_t i = 0; i < pts.size(); ++i) fv[i] = f(pn(pts[i]));
        cplx lambda{1.0};
        if (projective) {
            cplx num{};
            double den = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                num += std::conj(fv[i]) * gv[i];
                den += std::norm(fv[i]);
            }
            if (den > 0.0) lambda = num / den;
        }
        double err = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) err = std::max(err, std::abs(lambda * fv[i] - gv[i]));
        if (err < best.error) best = {false, n, err, lambda};
        if (err < eps) return {true, n, err, lambda};
    }
    return best;
}

}  // namespace lindyn::maps

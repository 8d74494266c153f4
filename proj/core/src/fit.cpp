#include "lindyn/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace lindyn::fit {

using Eigen::Index;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

struct ArnoldiFitter::Impl {
    std::vector<cplx> pts;
    std::vector<double> w;
    cplx c0;
    double s0{1.0};
    int max_degree{0};
    MatC Q;  // M x (D+1), columns have mean square 1
    MatC H;  // (D+1) x D Hessenberg recurrence
    Eigen::HouseholderQR<MatC> qr;

    // Basis columns at arbitrary points, following the recurrence that built Q.
    MatC basis_at(const std::vector<cplx>& z, int degree) const {
        const Index P = static_cast<Index>(z.size());
        VecC u(P);
        for (Index i = 0; i < P; ++i) u[i] = (z[static_cast<std::size_t>(i)] - c0) / s0;
        MatC W(P, degree + 1);
        W.col(0).setOnes();
        for (int k = 1; k <= degree; ++k) {
            VecC v = u.cwiseProduct(W.col(k - 1));
            v.noalias() -= W.leftCols(k) * H.col(k - 1).head(k);
            W.col(k) = v / H(k, k - 1);
        }
        return W;
    }
};

ArnoldiFitter::ArnoldiFitter(std::vector<cplx> points, std::vector<double> weights, int max_degree)
    : impl_(std::make_unique<Impl>()) {
    if (points.empty() || points.size() != weights.size())
        throw std::invalid_argument("fitter needs one positive weight per point");
    if (max_degree < 0) throw std::invalid_argument("max degree must be nonnegative");
    auto& I = *impl_;
    I.pts = std::move(points);
    I.w = std::move(weights);
    const Index M = static_cast<Index>(I.pts.size());
    if (static_cast<Index>(max_degree) + 1 > M) max_degree = static_cast<int>(M) - 1;

    double xmin = I.pts[0].real(), xmax = xmin, ymin = I.pts[0].imag(), ymax = ymin;
    for (auto z : I.pts) {
        xmin = std::min(xmin, z.real());
        xmax = std::max(xmax, z.real());
        ymin = std::min(ymin, z.imag());
        ymax = std::max(ymax, z.imag());
    }
    I.c0 = {(xmin + xmax) / 2.0, (ymin + ymax) / 2.0};
    I.s0 = std::max({(xmax - xmin) / 2.0, (ymax - ymin) / 2.0, 1e-300});

    VecC u(M);
    for (Index i = 0; i < M; ++i) u[i] = (I.pts[static_cast<std::size_t>(i)] - I.c0) / I.s0;
    const double sqrtM = std::sqrt(static_cast<double>(M));

    I.Q.resize(M, max_degree + 1);
    I.H = MatC::Zero(max_degree + 1, std::max(max_degree, 1));
    I.Q.col(0).setOnes();
    int built = 0;
    for (int k = 1; k <= max_degree; ++k) {
        VecC v = u.cwiseProduct(I.Q.col(k - 1));
        for (int pass = 0; pass < 2; ++pass) {
            VecC h = I.Q.leftCols(k).adjoint() * v / static_cast<double>(M);
            v.noalias() -= I.Q.leftCols(k) * h;
            I.H.col(k - 1).head(k) += h;
        }
        const double nrm = v.norm() / sqrtM;
        if (!(nrm > 1e-13)) break;  // the point set cannot separate higher degrees
        I.H(k, k - 1) = nrm;
        I.Q.col(k) = v / nrm;
        built = k;
    }
    I.max_degree = built;
    I.Q.conservativeResize(M, built + 1);

    Eigen::VectorXd wv(M);
    for (Index i = 0; i < M; ++i) wv[i] = I.w[static_cast<std::size_t>(i)];
    I.qr.compute(wv.asDiagonal() * I.Q);
}

ArnoldiFitter::~ArnoldiFitter() = default;
ArnoldiFitter::ArnoldiFitter(ArnoldiFitter&&) noexcept = default;
ArnoldiFitter& ArnoldiFitter::operator=(ArnoldiFitter&&) noexcept = default;

int ArnoldiFitter::max_degree() const { return impl_->max_degree; }
const std::vector<cplx>& ArnoldiFitter::points() const { return impl_->pts; }
const std::vector<double>& ArnoldiFitter::weights() const { return impl_->w; }

std::vector<cplx> ArnoldiFitter::project(const std::vector<cplx>& rhs) const {
    const auto& I = *impl_;
    if (rhs.size() != I.pts.size()) throw std::invalid_argument("right-hand side has the wrong length");
    const Index M = static_cast<Index>(rhs.size());
    VecC b(M);
    for (Index i = 0; i < M; ++i) b[i] = I.w[static_cast<std::size_t>(i)] * rhs[static_cast<std::size_t>(i)];
    VecC y = I.qr.householderQ().adjoint() * b;
    return {y.data(), y.data() + I.max_degree + 1};
}

std::vector<cplx> ArnoldiFitter::coefficients(const std::vector<cplx>& projection, int degree) const {
    const auto& I = *impl_;
    if (degree < 0 || degree > I.max_degree) throw std::out_of_range("degree outside the fitter's range");
    const Index n = degree + 1;
    Eigen::Map<const VecC> y(projection.data(), n);
    VecC x = I.qr.matrixQR().topLeftCorner(n, n).triangularView<Eigen::Upper>().solve(y);
    return {x.data(), x.data() + n};
}

std::vector<cplx> ArnoldiFitter::solve(const std::vector<cplx>& rhs, int degree) const {
    return coefficients(project(rhs), degree);
}

std::vector<cplx> ArnoldiFitter::values(const std::vector<cplx>& coeffs) const {
    const auto& I = *impl_;
    Eigen::Map<const VecC> x(coeffs.data(), static_cast<Index>(coeffs.size()));
    VecC v = I.Q.leftCols(static_cast<Index>(coeffs.size())) * x;
    return {v.data(), v.data() + v.size()};
}

std::vector<cplx> ArnoldiFitter::eval(const std::vector<cplx>& coeffs, const std::vector<cplx>& z) const {
    if (coeffs.empty()) return std::vector<cplx>(z.size(), cplx{});
    const MatC W = impl_->basis_at(z, static_cast<int>(coeffs.size()) - 1);
    Eigen::Map<const VecC> x(coeffs.data(), static_cast<Index>(coeffs.size()));
    VecC v = W * x;
    return {v.data(), v.data() + v.size()};
}

holo::Basis ArnoldiFitter::natural_basis() const {
    const auto& pts = impl_->pts;
    cplx m{};
    for (auto z : pts) m += z;
    m /= static_cast<double>(pts.size());
    double sxx = 0, syy = 0, sxy = 0;
    for (auto z : pts) {
        const cplx d = z - m;
        sxx += d.real() * d.real();
        syy += d.imag() * d.imag();
        sxy += d.real() * d.imag();
    }
    const double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    const cplx dir = std::polar(1.0, theta);
    double tmin = 0, tmax = 0, perp = 0;
    for (auto z : pts) {
        const cplx r = (z - m) / dir;
        tmin = std::min(tmin, r.real());
        tmax = std::max(tmax, r.real());
        perp = std::max(perp, std::abs(r.imag()));
    }
    const double half = (tmax - tmin) / 2.0;
    if (half > 0.0 && perp <= 0.5 * half) return holo::ChebyshevBasis{m + dir * tmin, m + dir * tmax};
    double rad = 0.0;
    for (auto z : pts) rad = std::max(rad, std::abs(z - m));
    return holo::PowerBasis{m, std::max(rad, 1e-300)};
}

holo::ComplexPoly ArnoldiFitter::to_poly(const std::vector<cplx>& coeffs, const holo::Basis& basis) const {
    const int deg = static_cast<int>(coeffs.size()) - 1;
    if (deg < 0) return holo::ComplexPoly({}, basis);
    return holo::interpolate_values(eval(coeffs, holo::interpolation_nodes(basis, deg)), basis);
}

Escalation escalate(const ArnoldiFitter& fitter, const std::vector<cplx>& rhs, const std::vector<char>& checked,
                    double tol, int start, int step) {
    if (checked.size() != rhs.size()) throw std::invalid_argument("mask has the wrong length");
    if (step < 1) step = 1;
    const auto y = fitter.project(rhs);
    Escalation best;
    best.residual = std::numeric_limits<double>::infinity();
    const int top = fitter.max_degree();
    for (int d = std::max(0, std::min(start, top));; d = std::min(d + step, top)) {
        auto x = fitter.coefficients(y, d);
        const auto v = fitter.values(x);
        double r = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            if (checked[i]) r = std::max(r, std::abs(v[i] - rhs[i]));
        if (r < best.residual) best = {false, d, r, std::move(x)};
        if (r < tol) {
            best.ok = true;
            return best;
        }
        if (d == top) break;
    }
    return best;
}

}  // namespace lindyn::fit

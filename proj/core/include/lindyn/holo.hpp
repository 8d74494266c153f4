#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace lindyn {

using cplx = std::complex<double>;
using Evaluable = std::function<cplx(cplx)>;

}  // namespace lindyn

namespace lindyn::holo {

// p(z) = sum c_k ((z - center) / scale)^k.  The default is the standard monomial basis.
struct PowerBasis {
    cplx center{0.0, 0.0};
    cplx scale{1.0, 0.0};
    bool operator==(const PowerBasis&) const = default;
};

// p(z) = sum c_k T_k(u) with u = (2z - a - b) / (b - a); a and b are the segment ends.
struct ChebyshevBasis {
    cplx a{-1.0, 0.0};
    cplx b{1.0, 0.0};
    bool operator==(const ChebyshevBasis&) const = default;
};

using Basis = std::variant<PowerBasis, ChebyshevBasis>;

inline constexpr int kZeroDegree = -1;

class ComplexPoly {
public:
    ComplexPoly() = default;
    explicit ComplexPoly(std::vector<cplx> coeffs);
    ComplexPoly(std::vector<cplx> coeffs, Basis basis);

    static ComplexPoly constant(cplx c);
    static ComplexPoly monomial(int k, cplx c = 1.0);

    const std::vector<cplx>& coeffs() const { return coeffs_; }
    const Basis& basis() const { return basis_; }
    bool is_standard() const;

    // Highest index with a nonzero coefficient, kZeroDegree for the zero polynomial.
    int degree() const;
    bool is_zero() const { return degree() == kZeroDegree; }

    cplx operator()(cplx z) const;

    ComplexPoly operator-() const;
    ComplexPoly& operator+=(const ComplexPoly& other);
    ComplexPoly& operator-=(const ComplexPoly& other);
    ComplexPoly& operator*=(cplx s);

    friend ComplexPoly operator+(ComplexPoly lhs, const ComplexPoly& rhs) { return lhs += rhs; }
    friend ComplexPoly operator-(ComplexPoly lhs, const ComplexPoly& rhs) { return lhs -= rhs; }
    friend ComplexPoly operator*(ComplexPoly p, cplx s) { return p *= s; }
    friend ComplexPoly operator*(cplx s, ComplexPoly p) { return p *= s; }

    // Coefficients and basis identical (no numerical tolerance).
    bool operator==(const ComplexPoly& other) const;

private:
    std::vector<cplx> coeffs_;
    Basis basis_{PowerBasis{}};
};

cplx eval(const ComplexPoly& p, cplx z);

// Standard monomial evaluation by Horner's rule.  Requires a standard-basis polynomial.
cplx horner(const std::vector<cplx>& coeffs, cplx z);

ComplexPoly derivative(const ComplexPoly& p, int j);

// j-fold antiderivative whose derivatives of order < j vanish at z = 0.
ComplexPoly antiderivative(const ComplexPoly& p, int j);

// z -> p(alpha z + beta).  Only the basis parameters change, coefficients are kept.
ComplexPoly compose_affine(const ComplexPoly& p, cplx alpha, cplx beta);

// Re-expand in the target basis by interpolation on that basis' natural nodes
// (Chebyshev points or roots of unity).  Exact up to rounding when degree suffices.
std::vector<cplx> interpolation_nodes(const Basis& target, int degree);
ComplexPoly interpolate_values(const std::vector<cplx>& values, const Basis& target);
ComplexPoly interpolate(const Evaluable& f, const Basis& target, int degree);
ComplexPoly rebase(const ComplexPoly& p, const Basis& target);

// Monomial coefficients about 0.  Ill-conditioned for long Chebyshev series; intended
// for low degree and for standard JSON output.
ComplexPoly to_standard(const ComplexPoly& p);

class CompactSet {
public:
    enum class Kind { Disk, Points };

    static constexpr int kDefaultBoundarySamples = 256;

    static CompactSet disk(cplx center, double radius, int boundary_samples = kDefaultBoundarySamples);
    static CompactSet points(std::vector<cplx> pts);

    Kind kind() const { return kind_; }
    // For point clouds: centroid and the radius of the enclosing disk about it.
    cplx center() const { return center_; }
    double radius() const { return radius_; }
    int boundary_samples() const { return boundary_samples_; }
    const std::vector<cplx>& samples() const { return samples_; }

    // Same set with a different boundary density (disks only; point clouds are returned as is).
    CompactSet with_density(int boundary_samples) const;
    CompactSet enlarged(double by) const;

private:
    Kind kind_{Kind::Disk};
    cplx center_{};
    double radius_{0.0};
    int boundary_samples_{0};
    std::vector<cplx> samples_;
};

// Lower bound for the sup of |f| on K: maximum over the sample set.
double sup_norm_on(const Evaluable& f, const CompactSet& K);
double sup_norm_on(const ComplexPoly& p, const CompactSet& K);

class PlanarDomain {
public:
    enum class Kind { RightHalfPlane, OpenDisk };

    static PlanarDomain right_half_plane(double offset = 0.0);
    static PlanarDomain open_disk(cplx center, double radius);

    // Replace the built-in exhaustion.  Members must be nested and lie inside with margin.
    PlanarDomain with_exhaustion(std::vector<CompactSet> members) const;

    Kind kind() const { return kind_; }
    double offset() const { return offset_; }
    cplx center() const { return center_; }
    double radius() const { return radius_; }

    bool contains(cplx z, double margin = 0.0) const;
    // Signed distance to the boundary, positive inside.
    double boundary_distance(cplx z) const;
    bool contains(const CompactSet& K, double margin = 0.0) const;

    // 1-based exhaustion member.  The built-in exhaustion is unbounded.
    CompactSet exhaustion(int n) const;
    std::optional<int> exhaustion_length() const;
    bool has_explicit_exhaustion() const { return !explicit_.empty(); }
    const std::vector<CompactSet>& explicit_exhaustion() const { return explicit_; }

private:
    Kind kind_{Kind::RightHalfPlane};
    double offset_{0.0};
    cplx center_{};
    double radius_{0.0};
    std::vector<CompactSet> explicit_;
};

inline constexpr int kDefaultFrechetTerms = 30;

struct FrechetDistance {
    double value{0.0};
    double truncation_bound{0.0};  // 2^-N
};

// d_n(f) = sup over the n-th exhaustion member, n = 1..N.
std::vector<double> exhaustion_sups(const Evaluable& f, const PlanarDomain& dom, int N);
double frechet_from_sups(const std::vector<double>& sups);

FrechetDistance frechet_distance(const Evaluable& f, const Evaluable& g, const PlanarDomain& dom,
                                 int N = kDefaultFrechetTerms);

Evaluable as_evaluable(const ComplexPoly& p);

}  // namespace lindyn::holo

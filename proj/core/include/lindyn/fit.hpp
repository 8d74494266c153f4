#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include "lindyn/holo.hpp"

namespace lindyn::fit {

class FitFailure : public std::runtime_error {
public:
    FitFailure(const std::string& what, double best_residual, int best_degree)
        : std::runtime_error(what), best_residual_(best_residual), best_degree_(best_degree) {}
    double best_residual() const { return best_residual_; }
    int best_degree() const { return best_degree_; }

private:
    double best_residual_;
    int best_degree_;
};

// Weighted polynomial least squares on a fixed point set.  The polynomial space is
// spanned by a Krylov basis orthonormalized over all points (Vandermonde with Arnoldi),
// which stays well conditioned where monomials on long point sets do not.
class ArnoldiFitter {
public:
    ArnoldiFitter(std::vector<cplx> points, std::vector<double> weights, int max_degree);
    ~ArnoldiFitter();
    ArnoldiFitter(ArnoldiFitter&&) noexcept;
    ArnoldiFitter& operator=(ArnoldiFitter&&) noexcept;

    int max_degree() const;
    const std::vector<cplx>& points() const;
    const std::vector<double>& weights() const;

    // Q^H W b for the weighted QR factorization; reusable for every degree.
    std::vector<cplx> project(const std::vector<cplx>& rhs) const;
    // Basis coefficients of the least-squares solution of the given degree.
    std::vector<cplx> coefficients(const std::vector<cplx>& projection, int degree) const;
    std::vector<cplx> solve(const std::vector<cplx>& rhs, int degree) const;

    std::vector<cplx> values(const std::vector<cplx>& coeffs) const;
    std::vector<cplx> eval(const std::vector<cplx>& coeffs, const std::vector<cplx>& z) const;

    // Basis suited to the point layout: Chebyshev on the principal segment for elongated
    // sets, a scaled power basis about the center otherwise.
    holo::Basis natural_basis() const;
    holo::ComplexPoly to_poly(const std::vector<cplx>& coeffs, const holo::Basis& basis) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct Escalation {
    bool ok{false};
    int degree{0};
    double residual{0.0};  // max |p - rhs| over checked points
    std::vector<cplx> coeffs;
};

// Smallest degree in start, start+step, ... <= max_degree meeting tol on the checked points;
// on failure the best degree seen is returned with ok = false.
Escalation escalate(const ArnoldiFitter& fitter, const std::vector<cplx>& rhs, const std::vector<char>& checked,
                    double tol, int start = 0, int step = 1);

}  // namespace lindyn::fit

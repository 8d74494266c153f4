#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lindyn/fit.hpp"
#include "lindyn/holo.hpp"
#include "lindyn/maps.hpp"

namespace lindyn::luh {

using holo::CompactSet;
using holo::ComplexPoly;
using holo::PlanarDomain;
using maps::SelfMap;

// ---------------------------------------------------------------------------
// Schedule

struct DiskChain {
    std::vector<CompactSet> G;    // G_1, G_2, ...
    std::vector<double> L;        // boundary length of G_n
    std::vector<double> r;        // r_n in (0, 1/n)
    std::vector<double> d;        // d_0 = 1, d_1, ..., d_stages
    std::vector<double> eps;      // eps_1, ..., eps_stages
    std::vector<double> log_eps;

    int stages() const { return static_cast<int>(eps.size()); }
    // eps_n for 1 <= n; past the horizon the last value is repeated.
    double eps_at(int n) const;
};

// eps_n = min{2 pi d_{n-1}^{2n} / ((2n-1)! L_n n^2), r_n^{2n} / ((2n)! 2^{2n+1} n)}.
double schedule_log_epsilon(int n, double d_prev, double L_n, double r_n);
double schedule_epsilon(int n, double d_prev, double L_n, double r_n);
// Same formula with plain factorials; only usable while they fit in a double.
double schedule_epsilon_direct(int n, double d_prev, double L_n, double r_n);

class InfeasibleChain : public std::runtime_error {
public:
    InfeasibleChain(int stage, const std::string& why);
    int stage() const { return stage_; }

private:
    int stage_;
};

inline constexpr double kDefaultRScale = 0.4;

// Nested disks inside the domain; d_n is measured against the domain's exhaustion.
DiskChain make_disk_chain(const PlanarDomain& dom, int stages, double r_scale = kDefaultRScale);

// ---------------------------------------------------------------------------
// Fitting oracle

struct MergelyanFit {
    ComplexPoly poly;
    int degree{0};
    double residual_A{0.0};
    double residual_B{0.0};
};

MergelyanFit mergelyan_fit(const CompactSet& A, const Evaluable& fA, const CompactSet& B, const Evaluable& fB,
                           double tol, int max_degree);

// ---------------------------------------------------------------------------
// Task and construction state

struct LuhParams {
    double enlarge{0.5};          // fit on disks enlarged by this much, certify on the originals
    double placement_gap{16.0};   // min distance between enlarged regions of different placements
    int max_degree{500};
    int degree_step{10};
    int fit_samples{64};          // boundary samples per enlarged disk in the fit
    double anchor_radius{0.4};
    double gap_weight{1e-8};
    double gap_spacing{0.5};
    double fit_floor{1e-5};       // smallest per-stage fit tolerance attempted
    double margin{maps::kDefaultMargin};
    std::int64_t max_index{100000};
    int verify_factor{10};        // density multiplier for certificate re-verification
    double r_scale{kDefaultRScale};
};

struct LuhTask {
    PlanarDomain domain;
    SelfMap phi;
    std::vector<ComplexPoly> targets;
    std::vector<CompactSet> compacts;
    std::vector<int> orders;
    std::vector<double> tolerances;
    LuhParams params;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
    int lowest_order() const;   // J_lo = max(0, -min order)
    int highest_order() const;  // J_hi = max(0, max order)
};

struct Requirement {
    int target{0};
    int order{0};
    int compact{0};
    int tolerance{0};
    double eps{0.0};
    bool operator==(const Requirement&) const = default;
};

// Diagonal over (tolerance, target, order rank, compact); orders ranked 0, +1, -1, +2, -2, ...
std::vector<Requirement> enumerate_requirements(const LuhTask& task);

struct Placement {
    int stage{0};
    int target{0};
    int order{0};
    std::int64_t index{0};
    std::vector<CompactSet> images;  // phi_index of each task compact
};

struct StagePlan {
    int stage{0};
    int target{0};
    CompactSet k_double_prime;  // union of the task compacts as a point cloud
    double r_n{0.0};
    std::vector<Placement> placements;
    std::vector<double> separations;  // pairwise distances between placement regions
};

struct StageRecord {
    int stage{0};
    int target{0};
    std::vector<int> orders;
    std::vector<std::int64_t> indices;
    double eps_n{0.0};
    double tau_n{0.0};
    int degree{0};
    double fit_residual{0.0};
    double correction_sup{0.0};   // sup over K'' of the stage's increment of h
    double bound{0.0};            // 2/n^2, enforced for n >= 2
    double leakage_sup{0.0};      // sup of the increment over all other placements
    ComplexPoly correction;       // increment of h
    ComplexPoly lambda_increment; // n-fold antiderivative of the increment
};

struct FitContext;

struct LuhStageState {
    int stage{0};
    ComplexPoly h_partial;
    ComplexPoly master;     // H with h = derivative(H, J_lo)
    ComplexPoly lambda;     // sum of lambda increments
    DiskChain schedule;
    std::vector<Placement> placements;
    std::vector<StageRecord> records;
    std::vector<Requirement> handled;
    std::shared_ptr<const FitContext> fit;
};

class StageBoundViolation : public std::runtime_error {
public:
    StageBoundViolation(int stage, double measured, double bound);
    int stage() const { return stage_; }
    double measured() const { return measured_; }

private:
    int stage_;
    double measured_;
};

class StageFitFailure : public fit::FitFailure {
public:
    StageFitFailure(int stage, double tol, double best_residual, int best_degree);
    int stage() const { return stage_; }

private:
    int stage_;
};

LuhStageState initial_state(const LuhTask& task, DiskChain schedule);

// Plans the next stage around the requirement's target: one fresh run-away index per
// pending order j with |j| <= n.
StagePlan plan_stage(const LuhStageState& state, const LuhTask& task, const Requirement& requirement);
// Same, restricted to the given orders.
StagePlan plan_stage(const LuhStageState& state, const LuhTask& task, const Requirement& requirement,
                     const std::vector<int>& orders);

// Registers the plan's placements so later plans and fits see them.
LuhStageState with_plan(const LuhStageState& state, const StagePlan& plan);

LuhStageState build_stage(const LuhStageState& state, const StagePlan& plan, const LuhTask& task);

// ---------------------------------------------------------------------------
// Certificates

struct RequirementResult {
    Requirement requirement;
    bool covered{false};
    int stage{0};
    std::int64_t witness{0};
    double error{0.0};
    std::optional<double> dense_error;
    bool met{false};
};

struct LuhCertificate {
    std::vector<RequirementResult> entries;
    int stages_run{0};
    bool complete() const;
    std::vector<RequirementResult> unmet() const;
};

struct LuhRun {
    ComplexPoly h;
    LuhCertificate certificate;
    LuhStageState state;
};

// Measures sup_K |h^(j) o phi_n - f_k| for every placement that serves a requirement.
LuhCertificate certify(const ComplexPoly& h, const LuhTask& task, const std::vector<Placement>& placements,
                       const std::vector<Requirement>& requirements, int density_factor = 1);

LuhRun run_luh(const LuhTask& task, const DiskChain& schedule, int stage_budget);

// ---------------------------------------------------------------------------
// Dense approximation

struct DenseApprox {
    ComplexPoly f;
    double delta{0.0};
    double d_delta_f0{0.0};  // metric size of delta * f0
    double d_f_g{0.0};       // measured metric distance between f and g
    double truncation_bound{0.0};
};

DenseApprox dense_approx(const ComplexPoly& f0, const ComplexPoly& g, const PlanarDomain& dom, double eps,
                         int N = holo::kDefaultFrechetTerms);

}  // namespace lindyn::luh

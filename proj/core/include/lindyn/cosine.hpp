#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lindyn::cosine {

inline constexpr int kDefaultCellsPerUnit = 16;

// Samples f(t_i) at t_i = (start + i) / m with m cells per unit length; each sample stands
// for the cell [t_i, t_i + 1/m).  Zero outside the stored range.
class GridFunction {
public:
    explicit GridFunction(int cells_per_unit = kDefaultCellsPerUnit);
    GridFunction(int cells_per_unit, std::int64_t start, std::vector<double> values);

    // chi_[a, b): cells whose left endpoint lies in [a, b).
    static GridFunction indicator(double a, double b, int cells_per_unit = kDefaultCellsPerUnit);
    // Unit point mass: a single cell of height 1 at t.
    static GridFunction unit_mass(double t, int cells_per_unit = kDefaultCellsPerUnit);

    int cells_per_unit() const { return m_; }
    double h() const { return 1.0 / m_; }
    std::int64_t start() const { return start_; }
    std::int64_t end() const { return start_ + static_cast<std::int64_t>(values_.size()); }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    double t(std::int64_t index) const { return static_cast<double>(index) / m_; }
    double at_index(std::int64_t index) const;
    double at(double t) const;

    // Cells carrying a nonzero value.
    std::vector<std::int64_t> support() const;
    GridFunction trimmed() const;

    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator-=(const GridFunction& o);
    GridFunction& operator*=(double s);
    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(GridFunction a, double s) { return a *= s; }
    friend GridFunction operator*(double s, GridFunction a) { return a *= s; }

    bool operator==(const GridFunction& o) const;

private:
    int m_;
    std::int64_t start_{0};
    std::vector<double> values_;
};

// Piecewise linear between knots with constant tails.  A repeated knot makes a jump; the
// function is right-continuous there.
class Weight {
public:
    static Weight constant(double c);
    static Weight piecewise_linear(std::vector<double> knots, std::vector<double> values);

    double operator()(double t) const;
    double left_limit(double t) const;
    double w_min() const { return w_min_; }
    double w_max() const { return w_max_; }
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> knots_;
    std::vector<double> values_;
    double w_min_{1.0};
    double w_max_{1.0};
};

// w = M on t <= -1, affine on [-1, 1], 1 + delta on t >= 1.  Needs delta >= 1, M >= 2 + 2 delta.
Weight example_weight(double M, double delta);

// T f(t) = w(t) f(t - 1) and its inverse S f(t) = f(t + 1) / w(t + 1).
GridFunction apply_T(const GridFunction& f, const Weight& w);
GridFunction apply_S(const GridFunction& f, const Weight& w);
// Closed-form products; std::overflow_error if a product leaves the double range.
GridFunction power_T(const GridFunction& f, const Weight& w, int n);
GridFunction power_S(const GridFunction& f, const Weight& w, int n);
// C^(n) h = (T^n h + S^n h) / 2.
GridFunction cosine_step(const GridFunction& f, const Weight& w, int n);

struct NormSpec {
    enum class Kind { Lp, Sup, Orlicz };
    enum class Young { Power, Exp };  // t^p or e^t - 1
    Kind kind{Kind::Lp};
    double p{1.0};
    Young young{Young::Power};

    static NormSpec lp(double p);
    static NormSpec sup();
    static NormSpec orlicz_power(double p);
    static NormSpec orlicz_exp();
    std::string name() const;
};

double norm(const GridFunction& f, const NormSpec& spec);

enum class Direction { Backward, ForwardInverse };

// Backward: prod_{j=1}^{n} w(x + j).  ForwardInverse: prod_{j=0}^{n-1} 1 / w(x - j).
double log_weight_product(const Weight& w, double x, int n, Direction dir);
double weight_product(const Weight& w, double x, int n, Direction dir);
// Sup over the closed cell [t_i, t_i + 1/m] of the product.
double cell_sup_product(const Weight& w, std::int64_t cell, int cells_per_unit, int n, Direction dir);

// ---------------------------------------------------------------------------
// Partitions and the condition checker

using CellSet = std::vector<std::int64_t>;  // sorted cell indices
using IntervalSet = std::vector<std::pair<double, double>>;  // unions of [a, b)

struct GridInterval {
    double a{0.0};
    double b{0.0};
    CellSet cells(int cells_per_unit) const;
};

CellSet cells_of(const IntervalSet& s, int cells_per_unit);
GridFunction restrict_to(const GridFunction& f, const CellSet& cells);
GridFunction indicator_of(const CellSet& cells, int cells_per_unit);

struct Partition {
    CellSet E, D, F;
};

class PartitionScheme {
public:
    enum class Kind { Whole, Threshold, Explicit };
    struct Sets {
        IntervalSet E, D, F;
    };

    static PartitionScheme whole();
    // D = cells where the backward 2n-product does not exceed the forward-inverse one.
    static PartitionScheme threshold();
    // One entry applies to every k; several entries are indexed by k (1-based), the last repeating.
    static PartitionScheme explicit_sets(std::vector<Sets> table);

    Kind kind() const { return kind_; }
    const std::vector<Sets>& table() const { return table_; }

    // Throws std::invalid_argument when the sets violate E = D u F, D n F = 0, E in K.
    Partition at(int k, int n, const CellSet& K, const Weight& w, int cells_per_unit) const;

private:
    Kind kind_{Kind::Whole};
    std::vector<Sets> table_;
};

inline constexpr int kConditionSequences = 7;
inline constexpr int kVerdictWindow = 5;

struct ConditionReport {
    std::vector<int> k;
    std::vector<int> n;
    std::array<std::vector<double>, kConditionSequences> seq;
    double tau{0.0};
    std::array<bool, kConditionSequences> seq_pass{};
    bool pass{false};
    // Uncrossed one-sided products sup_K back(n) and sup_K fwdinv(n), for audit.
    std::vector<double> one_sided_backward;
    std::vector<double> one_sided_forward_inverse;

    static const std::array<std::string, kConditionSequences>& names();
};

// Final value below tau and no increase across the last kVerdictWindow entries.
bool sequence_passes(const std::vector<double>& s, double tau);

ConditionReport check_conditions(const Weight& w, const GridInterval& K, const PartitionScheme& scheme,
                                 const std::vector<int>& n_seq, const NormSpec& spec, double tau,
                                 int cells_per_unit = kDefaultCellsPerUnit);

// ---------------------------------------------------------------------------
// Witness construction

class DegeneratePartition : public std::runtime_error {
public:
    explicit DegeneratePartition(const std::string& what) : std::runtime_error(what) {}
};

struct Witness {
    GridFunction v;
    double lambda{0.0};
    double A{0.0};
    double B{0.0};
};

Witness build_v(const GridFunction& f, const GridFunction& g, const CellSet& E, const CellSet& D, const CellSet& F,
                int n, const Weight& w, const NormSpec& spec);

struct DemoRow {
    int k{0};
    int n{0};
    double a{0.0};
    double b{0.0};
    double lambda{0.0};
};

struct DemoReport {
    std::vector<DemoRow> rows;
    std::vector<std::pair<int, std::string>> skipped;  // degenerate k with reason
    double tol{0.0};
    bool hit{false};
    std::optional<int> k0;
    std::optional<DemoRow> best;  // the hit row, or the row minimizing max(a, b)
};

DemoReport supercyclicity_demo(const GridFunction& f, const GridFunction& g, const Weight& w,
                               const PartitionScheme& scheme, const std::vector<int>& n_seq, const NormSpec& spec,
                               double tol);

}  // namespace lindyn::cosine

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lindyn/holo.hpp"

namespace lindyn::maps {

using holo::CompactSet;
using holo::PlanarDomain;

class SelfMap {
public:
    enum class Kind { Affine, Moebius };

    static SelfMap affine(cplx a, cplx b);
    static SelfMap moebius(cplx a, cplx b, cplx c, cplx d);
    static SelfMap identity() { return affine(1.0, 0.0); }
    static SelfMap translation(cplx b) { return affine(1.0, b); }

    // Same map, checked to send the first `depth` exhaustion members of dom into dom.
    SelfMap attached_to(const PlanarDomain& dom, int depth = 8) const;

    Kind kind() const { return kind_; }
    // Affine maps use a and b only; Moebius maps use all four entries.
    const std::array<cplx, 4>& coefficients() const { return m_; }
    cplx a() const { return m_[0]; }
    cplx b() const { return m_[1]; }
    cplx c() const { return m_[2]; }
    cplx d() const { return m_[3]; }
    const std::optional<PlanarDomain>& domain() const { return domain_; }

    cplx operator()(cplx z) const;
    bool is_identity() const;

    // Affine maps only.
    SelfMap inverse() const;

private:
    friend SelfMap iterate(const SelfMap& phi, std::int64_t n);

    Kind kind_{Kind::Affine};
    std::array<cplx, 4> m_{cplx{1.0}, cplx{}, cplx{}, cplx{1.0}};
    std::optional<PlanarDomain> domain_;
};

// phi composed with itself n times (n = 0 gives the identity).  Throws std::range_error
// when the affine closed form would overflow.
SelfMap iterate(const SelfMap& phi, std::int64_t n);

// Image of a disk; exact for affine maps, through three boundary images for Moebius maps.
CompactSet image_disk(const SelfMap& phi, const CompactSet& K);

inline constexpr double kDefaultMargin = 1e-6;

struct RunawayCertificate {
    CompactSet compact;
    std::int64_t witness_n{0};
    double separation{0.0};
    double injectivity_margin{0.0};
    // Affine maps: |a^n| and the exact distance between the disk and its image.
    std::optional<double> lipschitz;
    std::optional<double> exact_separation;
};

struct RunawayRefusal {
    enum class Reason { Overlap, NotInjective };
    CompactSet compact;
    std::int64_t n{0};
    Reason reason{Reason::Overlap};
    double separation{0.0};
    double injectivity_margin{0.0};
    std::string message;
};

using RunawayOutcome = std::variant<RunawayCertificate, RunawayRefusal>;

RunawayOutcome runaway_check(const SelfMap& phi, const CompactSet& K, std::int64_t n,
                             double margin = kDefaultMargin);

class ExhaustedSearch : public std::runtime_error {
public:
    ExhaustedSearch(int compact_index, std::int64_t n_max);
    int compact_index() const { return compact_index_; }
    std::int64_t n_max() const { return n_max_; }

private:
    int compact_index_;
    std::int64_t n_max_;
};

// Smallest witness per compact; compact indices in errors are 1-based.
std::vector<RunawayCertificate> universality_certificate(const SelfMap& phi, const PlanarDomain& dom, int depth,
                                                         std::int64_t n_max, double margin = kDefaultMargin);
std::vector<RunawayCertificate> universality_certificate(const SelfMap& phi, const std::vector<CompactSet>& compacts,
                                                         std::int64_t n_max, double margin = kDefaultMargin);

struct OrbitProbeResult {
    bool hit{false};
    std::int64_t n{0};   // hit index, or the best index on a miss
    double error{0.0};
    cplx lambda{1.0};
};

OrbitProbeResult orbit_probe(const Evaluable& f, const SelfMap& phi, const Evaluable& g, const CompactSet& K,
                             double eps, std::int64_t n_max, bool projective);

}  // namespace lindyn::maps

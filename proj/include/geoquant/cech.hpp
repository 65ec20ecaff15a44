#pragma once

// Finite Cech data for a line bundle: transition functions c_ij = exp(2 pi i q_ij)
// on the overlaps of an abstract cover, described by their real exponents q_ij.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace geoquant {

/// A real function on an overlap: a constant, or samples on the cover's shared
/// parameter grid. NaN samples mark parameter points outside the overlap.
struct OverlapFunction {
    bool sampled = false;
    double constant = 0.0;
    std::vector<double> samples;

    static OverlapFunction of_constant(double c) { return {false, c, {}}; }
    static OverlapFunction of_samples(std::vector<double> s) { return {true, 0.0, std::move(s)}; }
    /// Value at parameter sample `s`; NaN outside the overlap.
    double at(std::size_t s) const;
    OverlapFunction operator-() const;
};

/// One connected component of a triple intersection, oriented as (i, j, k).
/// An empty sample list means every sample where all three exponents are defined.
struct TripleComponent {
    std::size_t i, j, k;
    std::vector<std::size_t> samples;
};

class CechCover {
public:
    /// `sample_count` is the size of the shared parameter grid (1 for constant-only covers).
    explicit CechCover(std::size_t set_count, std::size_t sample_count = 1);

    std::size_t set_count() const { return set_count_; }
    std::size_t sample_count() const { return sample_count_; }

    /// Store (or replace) q_ij; q_ji = -q_ij is implied.
    void set_exponent(std::size_t i, std::size_t j, OverlapFunction q);
    void add_triple(TripleComponent t);

    bool has_overlap(std::size_t i, std::size_t j) const;
    /// q_ij at sample s (antisymmetric lookup); NaN if undefined there.
    double exponent(std::size_t i, std::size_t j, std::size_t s) const;
    bool all_constant() const;
    /// Stored overlaps with i < j.
    std::vector<std::pair<std::size_t, std::size_t>> overlaps() const;
    const std::vector<TripleComponent>& triples() const { return triples_; }

    /// Samples of a triple component after resolving the "all common samples" shorthand.
    std::vector<std::size_t> component_samples(const TripleComponent& t) const;

    /// q_ij -> q_ij + phi_i - phi_j with constant phi.
    CechCover gauge_moved(const std::vector<double>& phi) const;
    /// Every exponent multiplied by `lambda`.
    CechCover scaled(double lambda) const;

private:
    void check_index(std::size_t i) const;
    std::size_t set_count_, sample_count_;
    std::map<std::pair<std::size_t, std::size_t>, OverlapFunction> q_;  // keyed with i < j
    std::vector<TripleComponent> triples_;
};

/// 1e-9 for constant-only covers, 1e-6 when any exponent is sampled.
double default_tolerance(const CechCover& cover);

struct CocycleViolation {
    std::size_t triple;  // index into cover.triples()
    double spread;       // max - min of a_ijk over the component
};

struct CocycleReport {
    bool ok = true;
    std::vector<CocycleViolation> violations;
};

/// Checks that a_ijk = q_ij + q_jk - q_ik is constant on every triple component.
CocycleReport verify_cocycle(const CechCover& cover, double tol);

struct CocycleClass {
    std::vector<double> a;                 // per triple component, same order as cover.triples()
    bool is_integral = false;              // a itself is integral
    bool quantizable = false;              // integral after the x_ij shift (or already)
    std::optional<std::map<std::pair<std::size_t, std::size_t>, double>> x_shift;  // keyed with i < j
    std::vector<double> z;                 // a + x_ij + x_jk - x_ik (equals a when no shift)
    std::vector<long> integers;            // round(z) when quantizable
    double total = 0.0;                    // sum of a over oriented components

    long total_integer() const;
};

/// a_ijk per component, integrality, and the least-squares integralizing shift when needed.
/// Requires a passing cocycle check (PreconditionError otherwise).
CocycleClass integrality_class(const CechCover& cover, double tol);

/// Is c2_ij = lambda_i c1_ij / lambda_j on every overlap, with lambda_i = exp(2 pi i phi_i)?
bool equivalence_check(const CechCover& c1, const CechCover& c2, const std::vector<OverlapFunction>& phi,
                       double tol);

/// Largest |a_jkl - a_ikl + a_ijl - a_ijk| over all 4-tuples of sets, on samples where all six
/// exponents are defined. Zero when no quadruple overlap exists.
double quadruple_coboundary(const CechCover& cover);

/// Two integralizing shifts define the same class iff y_ij = x2_ij - x1_ij = c_i - c_j (mod Z)
/// for some set potential c.
bool same_torsor_class(const CechCover& cover, const std::map<std::pair<std::size_t, std::size_t>, double>& x1,
                       const std::map<std::pair<std::size_t, std::size_t>, double>& x2, double tol);

/// Cover fixture text format (one directive per line, '#' comments, sets are 0-based):
///   sets N
///   samples P                     (optional, default 1)
///   i j : <number>                constant exponent q_ij
///   i j : <file.csv>              sampled exponent; CSV header "sample,value", missing samples are outside
///   triple i j k [@ a-b,c,...]    oriented triple component with optional sample ranges
/// Relative CSV paths resolve against the fixture's directory.
CechCover load_cover(const std::string& path);

/// The same cover as a fixture text, with CSV files written next to `path`.
void save_cover(const CechCover& cover, const std::string& path);

namespace fixtures {

/// Three charts on the 2-sphere (north cap N and two southern half-caps A, B) with transition
/// exponents winding n times around the equatorial belt, sampled at `samples` belt angles.
CechCover sphere_charge(double n, std::size_t samples = 64);

/// Three arcs covering the circle with q_01 = q_12 = 0, q_02 = -1.
CechCover circle_constant();

}  // namespace fixtures

}  // namespace geoquant

#include "geoquant/grid.hpp"

#include <cmath>
#include <string>

#include "geoquant/error.hpp"

namespace geoquant {

Axis Axis::periodic(double lo, double hi, std::size_t count) {
    if (count == 0 || !(hi > lo)) throw ValidationError("periodic axis needs hi > lo and count > 0");
    return Axis{lo, (hi - lo) / static_cast<double>(count), count};
}

Axis Axis::closed(double lo, double hi, std::size_t count) {
    if (count < 2 || !(hi > lo)) throw ValidationError("closed axis needs hi > lo and count >= 2");
    return Axis{lo, (hi - lo) / static_cast<double>(count - 1), count};
}

Axis Axis::centered(double spacing, std::size_t count) {
    if (count == 0 || !(spacing > 0.0)) throw ValidationError("centered axis needs spacing > 0");
    return Axis{-static_cast<double>(count / 2) * spacing, spacing, count};
}

std::vector<double> Axis::values() const {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = (*this)[i];
    return v;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace {

void check_axis(const Axis& a, const char* what) {
    if (!(a.spacing > 0.0) || !std::isfinite(a.spacing) || !std::isfinite(a.start))
        throw ValidationError(std::string(what) + " axis spacing must be positive and finite");
    if (!is_power_of_two(a.count))
        throw ValidationError(std::string(what) + " axis sample count " + std::to_string(a.count) +
                              " is not a power of two");
}

}  // namespace

PhaseGrid::PhaseGrid(std::vector<Axis> q_axes, std::vector<Axis> p_axes, bool periodic)
    : q_axes_(std::move(q_axes)), p_axes_(std::move(p_axes)), periodic_(periodic) {
    if (q_axes_.empty() || q_axes_.size() != p_axes_.size())
        throw ValidationError("phase grid needs d >= 1 q axes and d p axes");
    for (const auto& a : q_axes_) check_axis(a, "q");
    for (const auto& a : p_axes_) check_axis(a, "p");
    const std::size_t r = rank();
    strides_.assign(r, 1);
    for (std::size_t a = r - 1; a > 0; --a) strides_[a - 1] = strides_[a] * axis(a).count;
    size_ = strides_[0] * axis(0).count;
    cell_volume_ = 1.0;
    for (std::size_t a = 0; a < r; ++a) cell_volume_ *= axis(a).spacing;
}

PhaseGrid PhaseGrid::plane(const Axis& q, const Axis& p, bool periodic) {
    return PhaseGrid({q}, {p}, periodic);
}

const Axis& PhaseGrid::axis(std::size_t a) const {
    return a < dim() ? q_axes_[a] : p_axes_[a - dim()];
}

std::vector<std::size_t> PhaseGrid::multi_index(std::size_t flat) const {
    std::vector<std::size_t> idx(rank());
    for (std::size_t a = 0; a < rank(); ++a) {
        idx[a] = flat / strides_[a];
        flat %= strides_[a];
    }
    return idx;
}

std::size_t PhaseGrid::flat_index(std::span<const std::size_t> idx) const {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < rank(); ++a) flat += idx[a] * strides_[a];
    return flat;
}

std::vector<double> PhaseGrid::node(std::size_t flat) const {
    std::vector<double> x(rank());
    node(flat, x);
    return x;
}

void PhaseGrid::node(std::size_t flat, std::span<double> out) const {
    for (std::size_t a = 0; a < rank(); ++a) {
        out[a] = axis(a)[flat / strides_[a]];
        flat %= strides_[a];
    }
}

long PhaseGrid::find_node(std::span<const double> point) const {
    if (point.size() != rank()) return -1;
    std::size_t flat = 0;
    for (std::size_t a = 0; a < rank(); ++a) {
        const Axis& ax = axis(a);
        const double s = (point[a] - ax.start) / ax.spacing;
        const double r = std::round(s);
        if (std::abs(s - r) > 1e-9 || r < 0.0 || r >= static_cast<double>(ax.count)) return -1;
        flat += static_cast<std::size_t>(r) * strides_[a];
    }
    return static_cast<long>(flat);
}

bool PhaseGrid::contains(std::span<const double> point) const {
    for (std::size_t a = 0; a < rank(); ++a) {
        const Axis& ax = axis(a);
        if (point[a] < ax.start || point[a] > ax.last()) return false;
    }
    return true;
}

bool PhaseGrid::operator==(const PhaseGrid& other) const {
    return periodic_ == other.periodic_ && q_axes_ == other.q_axes_ && p_axes_ == other.p_axes_;
}

}  // namespace geoquant

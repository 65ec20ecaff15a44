#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace geoquant {

/// Uniform sampling x_i = start + i * spacing, i = 0..count-1.
struct Axis {
    double start = 0.0;
    double spacing = 1.0;
    std::size_t count = 0;

    /// Axis of `count` nodes over [lo, hi). On a periodic axis hi is the image of lo.
    static Axis periodic(double lo, double hi, std::size_t count);
    /// Axis of `count` nodes including both endpoints lo and hi.
    static Axis closed(double lo, double hi, std::size_t count);
    /// Centered axis x_i = (i - count/2) * spacing.
    static Axis centered(double spacing, std::size_t count);

    double operator[](std::size_t i) const { return start + static_cast<double>(i) * spacing; }
    double last() const { return (*this)[count - 1]; }
    double period() const { return spacing * static_cast<double>(count); }
    std::vector<double> values() const;

    bool operator==(const Axis&) const = default;
};

bool is_power_of_two(std::size_t n);

/// Rectangular uniform grid over T*R^d with coordinates ordered (q_1..q_d, p_1..p_d).
/// Nodes are stored row-major: the last p axis varies fastest.
class PhaseGrid {
public:
    PhaseGrid(std::vector<Axis> q_axes, std::vector<Axis> p_axes, bool periodic);

    /// d = 1 convenience.
    static PhaseGrid plane(const Axis& q, const Axis& p, bool periodic);

    std::size_t dim() const { return q_axes_.size(); }
    std::size_t rank() const { return 2 * dim(); }
    bool periodic() const { return periodic_; }

    const std::vector<Axis>& q_axes() const { return q_axes_; }
    const std::vector<Axis>& p_axes() const { return p_axes_; }
    /// Axis a of the full coordinate list (q axes first).
    const Axis& axis(std::size_t a) const;

    std::size_t size() const { return size_; }
    std::size_t stride(std::size_t a) const { return strides_[a]; }
    double cell_volume() const { return cell_volume_; }

    std::vector<std::size_t> multi_index(std::size_t flat) const;
    std::size_t flat_index(std::span<const std::size_t> idx) const;
    /// Phase-space coordinates of node `flat`.
    std::vector<double> node(std::size_t flat) const;
    void node(std::size_t flat, std::span<double> out) const;

    /// Node index of a point lying on the grid (within 1e-9 of a spacing), or -1.
    long find_node(std::span<const double> point) const;
    /// True when every coordinate lies inside the closed node box.
    bool contains(std::span<const double> point) const;

    bool operator==(const PhaseGrid& other) const;

private:
    std::vector<Axis> q_axes_;
    std::vector<Axis> p_axes_;
    bool periodic_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
    double cell_volume_ = 0.0;
};

}  // namespace geoquant

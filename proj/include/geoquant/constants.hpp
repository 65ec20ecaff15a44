#pragma once

#include <numbers>

namespace geoquant {

// Action is measured in units of Planck's constant.
inline constexpr double planck_h = 1.0;
inline constexpr double hbar = planck_h / (2.0 * std::numbers::pi);
inline constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace geoquant

#pragma once

// Plain-text inputs and outputs shared by the library and the CLI.

#include <map>
#include <string>
#include <vector>

#include "geoquant/grid.hpp"
#include "geoquant/phasespace.hpp"

namespace geoquant {

std::string trim(const std::string& s);
/// Strict full-string numeric parse (no trailing characters).
bool parse_double(const std::string& s, double& out);
/// Text that round-trips the double exactly (17 significant digits).
std::string format_double(double v);

/// Numeric CSV with a required header line. Throws ValidationError on a header mismatch.
std::vector<std::vector<double>> read_csv(const std::string& path, const std::vector<std::string>& header);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Sampled phase-space data on a rank-2 grid as "q_index,p_index,value".
void write_grid_csv(const std::string& path, const PhaseGrid& grid, const std::vector<double>& values);
std::vector<double> read_grid_csv(const std::string& path, const PhaseGrid& grid);

/// Experiment file: "key = value" lines grouped under "[section]" headers; '#' starts a comment.
/// Keys before any header belong to section "".
using ExperimentSpec = std::map<std::string, std::map<std::string, std::string>>;
ExperimentSpec parse_experiment(const std::string& text);
ExperimentSpec load_experiment(const std::string& path);

/// Polynomial expression in q, p (d = 1) or q1..qd, p1..pd: numbers, pi, + - * / (by constants),
/// ^ with non-negative integer exponents, parentheses.
Polynomial parse_polynomial(const std::string& text, std::size_t dim);

}  // namespace geoquant

// Batch front end: one subcommand per module, JSON (or CSV) results on stdout,
// optional artifacts under --out.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "geoquant/bws.hpp"
#include "geoquant/cech.hpp"
#include "geoquant/constants.hpp"
#include "geoquant/error.hpp"
#include "geoquant/fock.hpp"
#include "geoquant/io.hpp"
#include "geoquant/prequant.hpp"
#include "geoquant/su2.hpp"
#include "geoquant/wigner.hpp"

using namespace geoquant;
using Json = nlohmann::ordered_json;

namespace {

enum class Kind { real, integer, boolean, text };

struct ParamDef {
    std::string key;
    Kind kind;
    std::string fallback;
    std::string help;
};

class Params {
public:
    Params(const std::vector<ParamDef>& defs, const std::map<std::string, std::string>& values)
        : defs_(defs), values_(values) {}

    double real(const std::string& key) const {
        double v = 0.0;
        if (!parse_double(values_.at(key), v) || !std::isfinite(v))
            throw ValidationError("parameter '" + key + "' must be a finite number, got '" + values_.at(key) + "'");
        return v;
    }
    long integer(const std::string& key) const {
        const double v = real(key);
        if (v != std::floor(v) || std::abs(v) > 1e15)
            throw ValidationError("parameter '" + key + "' must be an integer, got '" + values_.at(key) + "'");
        return static_cast<long>(v);
    }
    std::size_t count(const std::string& key) const {
        const long v = integer(key);
        if (v < 1) throw ValidationError("parameter '" + key + "' must be positive");
        return static_cast<std::size_t>(v);
    }
    bool boolean(const std::string& key) const {
        const auto& s = values_.at(key);
        if (s == "true" || s == "1") return true;
        if (s == "false" || s == "0") return false;
        throw ValidationError("parameter '" + key + "' must be true or false, got '" + s + "'");
    }
    const std::string& text(const std::string& key) const { return values_.at(key); }

    Json resolved() const {
        Json j = Json::object();
        for (const auto& d : defs_) {
            switch (d.kind) {
                case Kind::real: j[d.key] = real(d.key); break;
                case Kind::integer: j[d.key] = integer(d.key); break;
                case Kind::boolean: j[d.key] = boolean(d.key); break;
                case Kind::text: j[d.key] = text(d.key); break;
            }
        }
        return j;
    }

private:
    std::vector<ParamDef> defs_;
    std::map<std::string, std::string> values_;
};

struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

struct Output {
    Json results = Json::object();
    std::vector<Table> tables;
    std::function<void(const std::string& dir)> extra_files;
};

struct Context {
    std::uint64_t seed = 0;
    std::string out_dir;
};

struct Command {
    std::string module;
    std::string name;  // empty for single-command modules
    std::string help;
    std::vector<ParamDef> params;
    std::function<Output(const Params&, const Context&)> run;

    std::string label() const { return name.empty() ? module : module + " " + name; }
    std::string file_stem() const { return name.empty() ? module : module + "_" + name; }
};

// Uniform double in [lo, hi) from the generator's bits, independent of the standard library's distributions.
double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// --- JSON with 17 significant digits -------------------------------------------------------------

void write_json(std::ostream& os, const Json& j, int indent = 0) {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                break;
            }
            os << "{\n";
            bool first = true;
            for (const auto& [k, v] : j.items()) {
                os << (first ? "" : ",\n") << pad << Json(k).dump() << ": ";
                write_json(os, v, indent + 2);
                first = false;
            }
            os << "\n" << close << "}";
            break;
        }
        case Json::value_t::array: {
            bool scalars = true;
            for (const auto& v : j) scalars = scalars && !v.is_structured();
            if (j.empty()) {
                os << "[]";
            } else if (scalars) {
                os << "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) os << ", ";
                    write_json(os, j[i], indent);
                }
                os << "]";
            } else {
                os << "[\n";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    os << (i ? ",\n" : "") << pad;
                    write_json(os, j[i], indent + 2);
                }
                os << "\n" << close << "]";
            }
            break;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            if (std::isfinite(v))
                os << format_double(v);
            else
                os << "null";
            break;
        }
        default: os << j.dump();
    }
}

void print_table(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
        os << "\n";
    }
}

void flatten(const std::string& prefix, const Json& j, std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(prefix.empty() ? k : prefix + "." + k, v, out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) flatten(prefix + "[" + std::to_string(i) + "]", j[i], out);
    } else {
        std::ostringstream s;
        write_json(s, j);
        out.emplace_back(prefix, s.str());
    }
}

// --- shared builders -----------------------------------------------------------------------------

Observable polynomial_param(const Params& p, const std::string& key) { return Observable(parse_polynomial(p.text(key), 1)); }

Axis symmetric_axis(const Params& p) {
    const double half = p.real("half_width");
    if (half <= 0) throw ValidationError("parameter 'half_width' must be positive");
    const std::size_t n = p.count("grid");
    if (!is_power_of_two(n)) throw ValidationError("parameter 'grid' must be a power of two");
    return Axis::periodic(-half, half, n);
}

double positive(const Params& p, const std::string& key) {
    const double v = p.real(key);
    if (v <= 0) throw ValidationError("parameter '" + key + "' must be positive");
    return v;
}

WaveFunction gaussian_packet(const Axis& q, double sigma, double q0, double p0, double w) {
    std::vector<cplx> v(q.count);
    const double c = std::pow(std::numbers::pi * w * w, -0.25);
    for (std::size_t i = 0; i < q.count; ++i) {
        const double x = q[i] - q0;
        v[i] = c * std::exp(cplx(-x * x / (2 * w * w), p0 * x / sigma));
    }
    return WaveFunction(q, std::move(v), sigma);
}

Table distribution_table(const std::string& name, const PhaseDistribution& f) {
    Table t{name, {"q", "p", "value"}, {}};
    t.rows.reserve(f.values.size());
    for (std::size_t n = 0; n < f.values.size(); ++n) {
        const auto x = f.grid.node(n);
        t.rows.push_back({x[0], x[1], f.values[n]});
    }
    return t;
}

Json to_json(const std::vector<double>& v) { return Json(v); }

std::vector<ParamDef> packet_params(const std::string& half_width = "8") {
    return {
    {"grid", Kind::integer, "256", "q nodes (power of two)"},
    {"half_width", Kind::real, half_width, "q window is [-half_width, half_width)"},
    {"sigma", Kind::real, format_double(hbar), "semiclassical scale"},
    {"q0", Kind::real, "1.5", "packet center"},
    {"p0", Kind::real, "0", "packet momentum"},
    {"width", Kind::real, format_double(std::sqrt(hbar)), "packet width"},
    };
}

std::vector<ParamDef> with(std::vector<ParamDef> base, const std::vector<ParamDef>& more) {
    base.insert(base.end(), more.begin(), more.end());
    return base;
}

WaveFunction packet_from(const Params& p) {
    return gaussian_packet(symmetric_axis(p), positive(p, "sigma"), p.real("q0"), p.real("p0"), positive(p, "width"));
}

// --- commands ------------------------------------------------------------------------------------

Output run_cech(const Params& p, const Context& ctx) {
    const std::string fixture = p.text("fixture");
    CechCover cover = fixture == "sphere"   ? fixtures::sphere_charge(p.real("charge"), p.count("samples"))
                      : fixture == "circle" ? fixtures::circle_constant()
                                            : load_cover(fixture);
    if (p.real("scale") != 1.0) cover = cover.scaled(p.real("scale"));
    const double tol = p.real("tol") > 0 ? p.real("tol") : default_tolerance(cover);
    Output out;
    const auto report = verify_cocycle(cover, tol);
    out.results["cocycle_ok"] = report.ok;
    out.results["violations"] = report.violations.size();
    if (report.ok) {
        const auto cls = integrality_class(cover, tol);
        out.results["a_class"] = to_json(cls.a);
        out.results["integral"] = cls.is_integral;
        out.results["quantizable"] = cls.quantizable;
        out.results["total"] = cls.total;
        out.results["total_integer"] = cls.quantizable ? Json(cls.total_integer()) : Json(nullptr);
        std::mt19937_64 rng(ctx.seed);
        bool invariant = true;
        for (std::size_t m = 0; m < static_cast<std::size_t>(p.integer("gauge_moves")); ++m) {
            std::vector<double> phi(cover.set_count());
            for (auto& v : phi) v = uniform(rng, -5.0, 5.0);
            const auto moved = integrality_class(cover.gauge_moved(phi), tol);
            invariant = invariant && moved.is_integral == cls.is_integral && moved.quantizable == cls.quantizable &&
                        (!cls.quantizable || moved.total_integer() == cls.total_integer());
        }
        out.results["gauge_invariant"] = invariant;
    }
    out.extra_files = [cover](const std::string& dir) { save_cover(cover, dir + "/cover.txt"); };
    return out;
}

GridSection packet_section(const Params& p) {
    const double half = positive(p, "half_width");
    const std::size_t n = p.count("grid");
    const PhaseGrid grid = PhaseGrid::plane(Axis::periodic(-half, half, n), Axis::periodic(-half, half, n), true);
    const double q0 = p.real("center_q"), p0 = p.real("center_p"), w = positive(p, "width");
    std::vector<cplx> v(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto x = grid.node(k);
        v[k] = std::exp(-((x[0] - q0) * (x[0] - q0) + (x[1] - p0) * (x[1] - p0)) / (2 * w * w));
    }
    return GridSection(grid, std::move(v), ConnectionPotential::parse(p.text("gauge")));
}

const std::vector<ParamDef> section_params{
    {"grid", Kind::integer, "256", "nodes per axis"},
    {"half_width", Kind::real, "8", "window is [-half_width, half_width)^2"},
    {"center_q", Kind::real, "0", "Gaussian section center"},
    {"center_p", Kind::real, "0", "Gaussian section center"},
    {"width", Kind::real, "1", "Gaussian section width"},
    {"gauge", Kind::text, "symmetric", "connection potential: q_dp, p_dq or symmetric"},
};

Output run_prequant_commutator(const Params& p, const Context&) {
    Output out;
    out.results["defect"] = commutator_defect(polynomial_param(p, "f"), polynomial_param(p, "g"), packet_section(p));
    return out;
}

Output run_prequant_evolve(const Params& p, const Context&) {
    const auto s = packet_section(p);
    const auto u = evolve(polynomial_param(p, "h"), p.real("t"), s, static_cast<std::size_t>(p.integer("steps")));
    Output out;
    const double n0 = s.norm();
    out.results["norm_drift"] = std::abs(u.norm() - n0) / n0;
    out.results["global_phase"] = std::arg(inner_product(u, s));
    std::vector<double> density(u.values.size());
    for (std::size_t k = 0; k < density.size(); ++k) density[k] = std::norm(u.values[k]);
    out.extra_files = [grid = u.grid, density](const std::string& dir) { write_grid_csv(dir + "/prequant_density.csv", grid, density); };
    return out;
}

Output run_bws_levels(const Params& p, const Context&) {
    const long nmax = p.integer("nmax");
    if (nmax < 0) throw ValidationError("parameter 'nmax' must be non-negative");
    const auto lv = bws_levels(polynomial_param(p, "h"), static_cast<int>(nmax), positive(p, "tol"));
    Output out;
    Table t{"bws_levels", {"n", "E", "I"}, {}};
    Json rows = Json::array();
    for (const auto& [n, e] : lv.levels) {
        rows.push_back({{"n", n}, {"E_n", e}, {"I", lv.actions.at(n)}});
        t.rows.push_back({static_cast<double>(n), e, lv.actions.at(n)});
    }
    out.results["levels"] = rows;
    out.tables.push_back(std::move(t));
    return out;
}

Output run_su2_spectrum(const Params& p, const Context&) {
    const long n = p.integer("n");
    if (n < 0 || n > 200) throw ValidationError("parameter 'n' must lie in [0, 200]");
    const auto rep = induced_rep(static_cast<int>(n));
    const double j = n / 2.0;
    const Eigen::MatrixXcd c = rep.casimir();
    const Eigen::MatrixXcd expected = j * (j + 1) * Eigen::MatrixXcd::Identity(rep.dimension(), rep.dimension());
    double bracket = 0.0;
    for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3, k = (a + 2) % 3;
        const Eigen::MatrixXcd m = rep.generators[a] * rep.generators[b] - rep.generators[b] * rep.generators[a] - rep.generators[k];
        bracket = std::max(bracket, m.cwiseAbs().maxCoeff());
    }
    const Eigen::MatrixXcd h3 = cplx(0, 1) * rep.generators[2];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h3, false);
    std::vector<double> j3(es.eigenvalues().size());
    for (long k = 0; k < es.eigenvalues().size(); ++k) j3[static_cast<std::size_t>(k)] = es.eigenvalues()[k].real();
    std::sort(j3.begin(), j3.end());
    Output out;
    out.results["dimension"] = rep.dimension();
    out.results["casimir"] = c(0, 0).real();
    out.results["casimir_defect"] = (c - expected).cwiseAbs().maxCoeff();
    out.results["commutator_defect"] = bracket;
    out.results["j3_eigenvalues"] = to_json(j3);
    return out;
}

Output run_su2_quantizable(const Params& p, const Context&) {
    const auto n = quantizable(p.real("l"), positive(p, "tol"));
    Output out;
    out.results["quantizable"] = n.has_value();
    out.results["n"] = n ? Json(*n) : Json(nullptr);
    return out;
}

Output run_fock_spectrum(const Params& p, const Context&) {
    const auto op = quantize(Observable(harmonic_oscillator(p.real("omega"))), static_cast<int>(p.integer("trunc")));
    Output out;
    const auto ev = spectrum(op);
    out.results["eigenvalues"] = to_json(ev);
    Table t{"fock_spectrum", {"k", "eigenvalue"}, {}};
    for (std::size_t k = 0; k < ev.size(); ++k) t.rows.push_back({static_cast<double>(k), ev[k]});
    out.tables.push_back(std::move(t));
    return out;
}

Output run_fock_quantize(const Params& p, const Context&) {
    const auto op = quantize(polynomial_param(p, "f"), static_cast<int>(p.integer("trunc")));
    Output out;
    Table t{"fock_matrix", {"row", "col", "re", "im"}, {}};
    Json re = Json::array(), im = Json::array();
    for (long r = 0; r < op.matrix.rows(); ++r) {
        Json rr = Json::array(), ri = Json::array();
        for (long c = 0; c < op.matrix.cols(); ++c) {
            const cplx v = op.matrix(r, c);
            rr.push_back(v.real());
            ri.push_back(v.imag());
            t.rows.push_back({static_cast<double>(r), static_cast<double>(c), v.real(), v.imag()});
        }
        re.push_back(rr);
        im.push_back(ri);
    }
    out.results["dimension"] = op.matrix.rows();
    out.results["re"] = re;
    out.results["im"] = im;
    out.tables.push_back(std::move(t));
    return out;
}

Output run_wigner_transform(const Params& p, const Context&) {
    const auto psi = packet_from(p);
    const auto f = wigner_transform(psi, conjugate_p_axis(psi.q, psi.sigma, psi.q.count));
    Output out;
    out.results["norm_squared"] = psi.norm_squared();
    out.results["integral"] = f.integral();
    out.results["self_overlap"] = overlap(f, f);
    out.results["overlap_constant"] = 1.0 / (two_pi * psi.sigma);
    out.tables.push_back(distribution_table("wigner", f));
    return out;
}

Output run_wigner_evolve(const Params& p, const Context&) {
    const auto psi = packet_from(p);
    const Observable V = polynomial_param(p, "V");
    const double t = p.real("t"), mass = positive(p, "mass");
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(std::abs(t) * positive(p, "steps_per_unit"))));
    const auto psi_t = evolve_schrodinger(psi, V, t, steps, mass);
    const Axis pa = conjugate_p_axis(psi.q, psi.sigma, psi.q.count);
    const auto quantum = wigner_transform(psi_t, pa);
    const auto classical =
        evolve_liouville(wigner_transform(psi, pa), Observable(mechanical_hamiltonian(V, mass)), t, positive(p, "liouville_step"));
    Output out;
    out.results["norm_drift"] = std::abs(psi_t.norm_squared() - psi.norm_squared());
    out.results["deviation"] = l1_distance(quantum, classical) / psi.norm_squared();
    out.tables.push_back(distribution_table("wigner", quantum));
    return out;
}

Output run_wigner_coherence(const Params& p, const Context&) {
    const auto psi = packet_from(p);
    const CoherenceOptions opts{positive(p, "mass"), positive(p, "steps_per_unit"), positive(p, "liouville_step")};
    const auto curve = coherence_experiment(psi, polynomial_param(p, "V"), positive(p, "t_max"), p.count("samples"), opts);
    Output out;
    out.results["max_deviation"] = curve.max_deviation();
    out.results["times"] = to_json(curve.times);
    out.results["deviations"] = to_json(curve.deviations);
    Table t{"coherence", {"t", "deviation"}, {}};
    for (std::size_t s = 0; s < curve.times.size(); ++s) t.rows.push_back({curve.times[s], curve.deviations[s]});
    out.tables.push_back(std::move(t));
    return out;
}

Output run_wigner_overlap(const Params& p, const Context&) {
    const auto a = packet_from(p);
    const auto b = gaussian_packet(a.q, a.sigma, p.real("q0_b"), p.real("p0_b"), positive(p, "width_b"));
    const Axis pa = conjugate_p_axis(a.q, a.sigma, a.q.count);
    const auto fa = wigner_transform(a, pa), fb = wigner_transform(b, pa);
    Output out;
    out.results["overlap"] = overlap(fa, fb);
    out.results["inner_squared_over_2pi_sigma"] = std::norm(a.inner(b)) / (two_pi * a.sigma);
    return out;
}

Output run_wkb_build(const Params& p, const Context&) {
    const Observable V = polynomial_param(p, "V");
    const double mass = positive(p, "mass");
    const long level = p.integer("level");
    double E = p.real("E");
    if (level < 0) throw ValidationError("parameter 'level' must be non-negative");
    if (level > 0) E = bws_levels(Observable(mechanical_hamiltonian(V, mass)), static_cast<int>(level)).levels.at(static_cast<int>(level));
    const auto r = wkb_build(V, E, mass, symmetric_axis(p), p.real("trim"));
    const auto& s = r.solution;
    Output out;
    out.results["energy"] = s.energy;
    out.results["lo"] = s.lo;
    out.results["hi"] = s.hi;
    out.results["nodes"] = s.q.size();
    out.results["norm_squared"] = r.psi.norm_squared();
    Table sol{"wkb_solution", {"q", "S", "dS", "A"}, {}};
    for (std::size_t k = 0; k < s.q.size(); ++k) sol.rows.push_back({s.q[k], s.S[k], s.dS[k], s.A[k]});
    Table psi{"wkb_psi", {"q", "re", "im"}, {}};
    for (std::size_t k = 0; k < r.psi.q.count; ++k) psi.rows.push_back({r.psi.q[k], r.psi.values[k].real(), r.psi.values[k].imag()});
    out.tables.push_back(std::move(sol));
    out.tables.push_back(std::move(psi));
    return out;
}

std::vector<Command> commands() {
    const std::vector<ParamDef> dynamics{
        {"V", Kind::text, "q^2/2", "potential V(q)"},
        {"mass", Kind::real, "1", "particle mass"},
        {"steps_per_unit", Kind::real, "1000", "split-step steps per unit time"},
        {"liouville_step", Kind::real, "0.01", "leapfrog step for non-quadratic h"},
    };
    return {
        {"cech", "", "Cech integrality report for a cover fixture",
         {{"fixture", Kind::text, "sphere", "sphere, circle, or a cover file path"},
          {"charge", Kind::real, "1", "sphere fixture charge"},
          {"samples", Kind::integer, "64", "sphere fixture belt samples"},
          {"scale", Kind::real, "1", "multiply every exponent"},
          {"tol", Kind::real, "0", "tolerance (0 selects the default)"},
          {"gauge_moves", Kind::integer, "3", "random constant gauge moves checked for invariance"}},
         run_cech},
        {"prequant", "commutator", "Dirac defect of [f^, g^] on a Gaussian section",
         with({{"f", Kind::text, "q", "observable f"}, {"g", Kind::text, "p", "observable g"}}, section_params),
         run_prequant_commutator},
        {"prequant", "evolve", "prequantum evolution of a Gaussian section",
         with({{"h", Kind::text, "(q^2+p^2)/2", "Hamiltonian"},
               {"t", Kind::real, "1", "time"},
               {"steps", Kind::integer, "0", "midpoint substeps (0 = default)"}},
              section_params),
         run_prequant_evolve},
        {"bws", "levels", "Bohr-Wilson-Sommerfeld levels I(E_n) = n",
         {{"h", Kind::text, "p^2/2 + q^2/2", "Hamiltonian p^2/2m + V(q)"},
          {"nmax", Kind::integer, "3", "highest level"},
          {"tol", Kind::real, "1e-12", "action tolerance"}},
         run_bws_levels},
        {"su2", "spectrum", "induced representation on degree-n polynomials", {{"n", Kind::integer, "1", "degree"}},
         run_su2_spectrum},
        {"su2", "quantizable", "integrality of the weight l",
         {{"l", Kind::real, "0", "weight"}, {"tol", Kind::real, "1e-9", "tolerance on 4 pi l"}}, run_su2_quantizable},
        {"fock", "spectrum", "spectrum of the quantized oscillator",
         {{"omega", Kind::real, "1", "frequency"}, {"trunc", Kind::integer, "20", "truncation degree"}}, run_fock_spectrum},
        {"fock", "quantize", "matrix of a quadratic observable on z^0..z^N",
         {{"f", Kind::text, "q", "observable"}, {"trunc", Kind::integer, "5", "truncation degree"}}, run_fock_quantize},
        {"wigner", "transform", "Wigner function of a Gaussian packet", packet_params(), run_wigner_transform},
        {"wigner", "evolve", "quantum vs classical transport of a packet",
         with(with(packet_params(), dynamics), {{"t", Kind::real, "1", "time"}}), run_wigner_evolve},
        {"wigner", "coherence", "coherence curve D(t)",
         with(with(packet_params("16"), dynamics),
              {{"t_max", Kind::real, format_double(two_pi), "final time"}, {"samples", Kind::integer, "16", "time samples"}}),
         run_wigner_coherence},
        {"wigner", "overlap", "phase-space overlap of two packets",
         with(packet_params(), {{"q0_b", Kind::real, "-1", "second packet center"},
                              {"p0_b", Kind::real, "0.5", "second packet momentum"},
                              {"width_b", Kind::real, format_double(std::sqrt(hbar)), "second packet width"}}),
         run_wigner_overlap},
        {"wkb", "build", "WKB state in a potential well",
         {{"V", Kind::text, "q^2/2", "potential V(q)"},
          {"mass", Kind::real, "1", "particle mass"},
          {"E", Kind::real, "0.5", "energy (ignored when level > 0)"},
          {"level", Kind::integer, "0", "use the BWS level E_level"},
          {"grid", Kind::integer, "1024", "q nodes (power of two)"},
          {"half_width", Kind::real, "4", "q window is [-half_width, half_width)"},
          {"trim", Kind::real, "0.01", "domain trim as a fraction of the well width"}},
         run_wkb_build},
    };
}

std::map<std::string, std::string> resolve(const Command& cmd, const std::vector<Command>& all, const ExperimentSpec& spec,
                                           const std::map<std::string, std::string>& flags) {
    std::map<std::string, std::string> values;
    for (const auto& d : cmd.params) values[d.key] = d.fallback;
    if (const auto it = spec.find(cmd.module); it != spec.end()) {
        std::set<std::string> known;
        for (const auto& c : all)
            if (c.module == cmd.module)
                for (const auto& d : c.params) known.insert(d.key);
        for (const auto& [k, v] : it->second) {
            if (!known.count(k)) throw ValidationError("unknown key '" + k + "' in section [" + cmd.module + "]");
            if (values.count(k)) values[k] = v;
        }
    }
    for (const auto& [k, v] : flags) values[k] = v;
    return values;
}

void check_sections(const ExperimentSpec& spec, const std::vector<Command>& all) {
    for (const auto& [section, keys] : spec) {
        if (section.empty()) {
            for (const auto& [k, v] : keys)
                if (k != "seed" && k != "format" && k != "out") throw ValidationError("unknown global key '" + k + "'");
            continue;
        }
        bool found = false;
        for (const auto& c : all) found = found || c.module == section;
        if (!found) throw ValidationError("unknown section [" + section + "]");
    }
}

}  // namespace

int main(int argc, char** argv) {
    const auto all = commands();
    CLI::App app{"geometric quantization laboratory"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);
    std::string spec_path, out_dir, format = "json", seed_text;
    app.add_option("--spec", spec_path, "experiment file (key = value, [module] sections)");
    app.add_option("--out", out_dir, "directory for JSON and CSV artifacts");
    app.add_option("--seed", seed_text, "seed for randomized fixtures");
    app.add_option("--format", format, "stdout format")->check(CLI::IsMember({"json", "csv"}));

    std::map<std::string, CLI::App*> modules;
    std::vector<std::pair<CLI::App*, const Command*>> leaves;
    std::vector<std::map<std::string, std::string>> flag_values(all.size());
    std::vector<std::map<std::string, CLI::Option*>> flag_options(all.size());
    for (std::size_t c = 0; c < all.size(); ++c) {
        const auto& cmd = all[c];
        CLI::App*& mod = modules[cmd.module];
        if (!mod) {
            mod = app.add_subcommand(cmd.module, cmd.module + " commands");
            mod->fallthrough();
            if (!cmd.name.empty()) mod->require_subcommand(1);
        }
        CLI::App* leaf = cmd.name.empty() ? mod : mod->add_subcommand(cmd.name, cmd.help);
        leaf->fallthrough();
        for (const auto& d : cmd.params)
            flag_options[c][d.key] = leaf->add_option("--" + d.key, flag_values[c][d.key], d.help + " (default " + d.fallback + ")");
        leaves.emplace_back(leaf, &cmd);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        std::size_t index = 0;
        while (index < leaves.size() && !leaves[index].first->parsed()) ++index;
        if (index == leaves.size()) throw ValidationError("no subcommand selected");
        const Command& cmd = *leaves[index].second;

        ExperimentSpec spec;
        if (!spec_path.empty()) spec = load_experiment(spec_path);
        check_sections(spec, all);
        const auto globals = spec.count("") ? spec.at("") : std::map<std::string, std::string>{};
        if (seed_text.empty() && globals.count("seed")) seed_text = globals.at("seed");
        if (!app.get_option("--format")->count() && globals.count("format")) format = globals.at("format");
        if (out_dir.empty() && globals.count("out")) out_dir = globals.at("out");
        if (format != "json" && format != "csv") throw ValidationError("format must be json or csv");

        Context ctx;
        if (!seed_text.empty()) {
            double s = 0;
            if (!parse_double(seed_text, s) || s < 0 || s != std::floor(s) || s > 9.007199254740992e15)
                throw ValidationError("seed must be a non-negative integer");
            ctx.seed = static_cast<std::uint64_t>(s);
        }
        ctx.out_dir = out_dir;

        std::map<std::string, std::string> flags;
        for (const auto& [k, opt] : flag_options[index])
            if (opt->count()) flags[k] = flag_values[index][k];
        const Params params(cmd.params, resolve(cmd, all, spec, flags));
        Json resolved = params.resolved();
        const Output result = cmd.run(params, ctx);

        Json doc;
        doc["command"] = cmd.label();
        resolved["seed"] = ctx.seed;
        doc["resolved_params"] = resolved;
        doc["results"] = result.results;
        doc["wall_time_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

        if (!out_dir.empty()) {
            std::filesystem::create_directories(out_dir);
            std::ofstream js(out_dir + "/" + cmd.file_stem() + ".json");
            write_json(js, doc);
            js << "\n";
            for (const auto& t : result.tables) write_csv(out_dir + "/" + t.name + ".csv", t.header, t.rows);
            if (result.extra_files) result.extra_files(out_dir);
        }
        if (format == "json") {
            write_json(std::cout, doc);
            std::cout << "\n";
        } else if (!result.tables.empty()) {
            print_table(std::cout, result.tables.front());
        } else {
            std::vector<std::pair<std::string, std::string>> rows;
            flatten("", result.results, rows);
            std::cout << "key,value\n";
            for (const auto& [k, v] : rows) std::cout << k << "," << v << "\n";
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return e.category() == ErrorCategory::validation ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

#include "geoquant/cech.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "geoquant/error.hpp"
#include "geoquant/io.hpp"

namespace geoquant {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

double frac_to_nearest(double x) { return x - std::round(x); }

}  // namespace

double OverlapFunction::at(std::size_t s) const {
    if (!sampled) return constant;
    return s < samples.size() ? samples[s] : nan_v;
}

OverlapFunction OverlapFunction::operator-() const {
    OverlapFunction r = *this;
    r.constant = -r.constant;
    for (auto& v : r.samples) v = -v;
    return r;
}

CechCover::CechCover(std::size_t set_count, std::size_t sample_count)
    : set_count_(set_count), sample_count_(sample_count) {
    if (set_count == 0) throw ValidationError("cover needs at least one set");
    if (sample_count == 0) throw ValidationError("parameter grid needs at least one sample");
}

void CechCover::check_index(std::size_t i) const {
    if (i >= set_count_) throw StructureError("cover set index " + std::to_string(i) + " out of range");
}

void CechCover::set_exponent(std::size_t i, std::size_t j, OverlapFunction q) {
    check_index(i);
    check_index(j);
    if (i == j) throw StructureError("overlap needs two distinct sets");
    if (q.sampled && q.samples.size() != sample_count_)
        throw ShapeError("sampled exponent must cover the shared parameter grid");
    if (i > j) {
        std::swap(i, j);
        q = -q;
    }
    const auto key = std::make_pair(i, j);
    q_[key] = std::move(q);
}

void CechCover::add_triple(TripleComponent t) {
    check_index(t.i);
    check_index(t.j);
    check_index(t.k);
    if (t.i == t.j || t.j == t.k || t.i == t.k) throw StructureError("triple needs three distinct sets");
    for (auto s : t.samples)
        if (s >= sample_count_) throw StructureError("triple sample index out of range");
    triples_.push_back(std::move(t));
}

bool CechCover::has_overlap(std::size_t i, std::size_t j) const {
    return q_.count({std::min(i, j), std::max(i, j)}) > 0;
}

double CechCover::exponent(std::size_t i, std::size_t j, std::size_t s) const {
    const auto it = q_.find({std::min(i, j), std::max(i, j)});
    if (it == q_.end()) return nan_v;
    const double v = it->second.at(s);
    return i < j ? v : -v;
}

bool CechCover::all_constant() const {
    return std::none_of(q_.begin(), q_.end(), [](const auto& kv) { return kv.second.sampled; });
}

std::vector<std::pair<std::size_t, std::size_t>> CechCover::overlaps() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& kv : q_) out.push_back(kv.first);
    return out;
}

std::vector<std::size_t> CechCover::component_samples(const TripleComponent& t) const {
    for (auto [a, b] : {std::pair{t.i, t.j}, std::pair{t.j, t.k}, std::pair{t.i, t.k}})
        if (!has_overlap(a, b))
            throw StructureError("triple " + std::to_string(t.i) + " " + std::to_string(t.j) + " " +
                                 std::to_string(t.k) + " lacks overlap data for " + std::to_string(a) + " " +
                                 std::to_string(b));
    auto defined = [&](std::size_t s) {
        return !std::isnan(exponent(t.i, t.j, s)) && !std::isnan(exponent(t.j, t.k, s)) &&
               !std::isnan(exponent(t.i, t.k, s));
    };
    std::vector<std::size_t> out;
    if (t.samples.empty()) {
        for (std::size_t s = 0; s < sample_count_; ++s)
            if (defined(s)) out.push_back(s);
    } else {
        for (auto s : t.samples) {
            if (!defined(s))
                throw StructureError("triple component sample " + std::to_string(s) +
                                     " lies outside one of its overlaps");
            out.push_back(s);
        }
    }
    if (out.empty()) throw StructureError("triple component has an empty intersection");
    return out;
}

CechCover CechCover::gauge_moved(const std::vector<double>& phi) const {
    if (phi.size() != set_count_) throw ShapeError("gauge move needs one constant per set");
    CechCover out = *this;
    for (auto& [key, q] : out.q_) {
        const double shift = phi[key.first] - phi[key.second];
        q.constant += shift;
        for (auto& v : q.samples) v += shift;
    }
    return out;
}

CechCover CechCover::scaled(double lambda) const {
    CechCover out = *this;
    for (auto& [key, q] : out.q_) {
        q.constant *= lambda;
        for (auto& v : q.samples) v *= lambda;
    }
    return out;
}

double default_tolerance(const CechCover& cover) { return cover.all_constant() ? 1e-9 : 1e-6; }

namespace {

std::vector<double> triple_values(const CechCover& c, const TripleComponent& t) {
    std::vector<double> a;
    for (auto s : c.component_samples(t)) a.push_back(c.exponent(t.i, t.j, s) + c.exponent(t.j, t.k, s) - c.exponent(t.i, t.k, s));
    return a;
}

}  // namespace

CocycleReport verify_cocycle(const CechCover& cover, double tol) {
    CocycleReport r;
    for (std::size_t n = 0; n < cover.triples().size(); ++n) {
        const auto a = triple_values(cover, cover.triples()[n]);
        const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
        const double spread = *hi - *lo;
        if (spread > tol) {
            r.ok = false;
            r.violations.push_back({n, spread});
        }
    }
    return r;
}

long CocycleClass::total_integer() const {
    long s = 0;
    for (auto v : integers) s += v;
    return s;
}

CocycleClass integrality_class(const CechCover& cover, double tol) {
    const auto report = verify_cocycle(cover, tol);
    if (!report.ok) throw PreconditionError("transition data is not a cocycle; run verify_cocycle first");
    CocycleClass cls;
    const auto& triples = cover.triples();
    for (const auto& t : triples) {
        const auto vals = triple_values(cover, t);
        double mean = 0.0;
        for (auto v : vals) mean += v;
        cls.a.push_back(mean / static_cast<double>(vals.size()));
    }
    for (auto v : cls.a) cls.total += v;
    cls.is_integral = std::all_of(cls.a.begin(), cls.a.end(), [&](double v) { return std::abs(frac_to_nearest(v)) <= tol; });
    cls.z = cls.a;
    if (!cls.is_integral) {
        // Least squares for x minimizing |frac(a) + D x|, D the coboundary of edge constants onto triples.
        const auto edges = cover.overlaps();
        std::map<std::pair<std::size_t, std::size_t>, Eigen::Index> col;
        for (std::size_t e = 0; e < edges.size(); ++e) col[edges[e]] = static_cast<Eigen::Index>(e);
        const auto m = static_cast<Eigen::Index>(triples.size());
        Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, static_cast<Eigen::Index>(edges.size()));
        Eigen::VectorXd f(m);
        auto put = [&](Eigen::Index row, std::size_t i, std::size_t j, double sign) {
            if (i < j) d(row, col.at({i, j})) += sign;
            else d(row, col.at({j, i})) -= sign;
        };
        for (Eigen::Index r = 0; r < m; ++r) {
            const auto& t = triples[static_cast<std::size_t>(r)];
            put(r, t.i, t.j, 1.0);
            put(r, t.j, t.k, 1.0);
            put(r, t.i, t.k, -1.0);
            f(r) = frac_to_nearest(cls.a[static_cast<std::size_t>(r)]);
        }
        const Eigen::VectorXd x = d.completeOrthogonalDecomposition().solve(-f);
        const Eigen::VectorXd z = d * x;
        std::map<std::pair<std::size_t, std::size_t>, double> shift;
        for (std::size_t e = 0; e < edges.size(); ++e) shift[edges[e]] = x(static_cast<Eigen::Index>(e));
        for (Eigen::Index r = 0; r < m; ++r) cls.z[static_cast<std::size_t>(r)] += z(r);
        cls.quantizable =
            std::all_of(cls.z.begin(), cls.z.end(), [&](double v) { return std::abs(frac_to_nearest(v)) <= tol; });
        if (cls.quantizable) cls.x_shift = std::move(shift);
    } else {
        cls.quantizable = true;
    }
    if (cls.quantizable)
        for (auto v : cls.z) cls.integers.push_back(std::lround(v));
    return cls;
}

namespace {

void require_same_combinatorics(const CechCover& c1, const CechCover& c2) {
    if (c1.set_count() != c2.set_count() || c1.sample_count() != c2.sample_count() ||
        c1.overlaps() != c2.overlaps())
        throw StructureError("covers have different combinatorics");
}

}  // namespace

bool equivalence_check(const CechCover& c1, const CechCover& c2, const std::vector<OverlapFunction>& phi,
                       double tol) {
    require_same_combinatorics(c1, c2);
    if (phi.size() != c1.set_count()) throw ShapeError("need one lambda per cover set");
    for (const auto& f : phi)
        if (f.sampled && f.samples.size() != c1.sample_count())
            throw ShapeError("sampled lambda must cover the shared parameter grid");
    for (auto [i, j] : c1.overlaps()) {
        for (std::size_t s = 0; s < c1.sample_count(); ++s) {
            const double q1 = c1.exponent(i, j, s), q2 = c2.exponent(i, j, s);
            if (std::isnan(q1) && std::isnan(q2)) continue;
            if (std::isnan(q1) != std::isnan(q2)) throw StructureError("overlap supports differ between covers");
            const double r = q2 - q1 - phi[i].at(s) + phi[j].at(s);
            if (std::isnan(r)) throw StructureError("lambda undefined on an overlap sample");
            if (std::abs(frac_to_nearest(r)) > tol) return false;
        }
    }
    return true;
}

double quadruple_coboundary(const CechCover& cover) {
    const std::size_t n = cover.set_count();
    double worst = 0.0;
    auto a = [&](std::size_t i, std::size_t j, std::size_t k, std::size_t s) {
        return cover.exponent(i, j, s) + cover.exponent(j, k, s) - cover.exponent(i, k, s);
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
                for (std::size_t l = k + 1; l < n; ++l)
                    for (std::size_t s = 0; s < cover.sample_count(); ++s) {
                        const double d = a(j, k, l, s) - a(i, k, l, s) + a(i, j, l, s) - a(i, j, k, s);
                        if (!std::isnan(d)) worst = std::max(worst, std::abs(d));
                    }
    return worst;
}

bool same_torsor_class(const CechCover& cover, const std::map<std::pair<std::size_t, std::size_t>, double>& x1,
                       const std::map<std::pair<std::size_t, std::size_t>, double>& x2, double tol) {
    const auto edges = cover.overlaps();
    std::map<std::pair<std::size_t, std::size_t>, double> y;
    for (const auto& e : edges) {
        const auto a = x1.find(e), b = x2.find(e);
        if (a == x1.end() || b == x2.end()) throw StructureError("shift is missing an overlap");
        y[e] = b->second - a->second;
    }
    // Potential by breadth-first spanning forest, then every edge must agree mod Z.
    std::vector<std::optional<double>> c(cover.set_count());
    for (std::size_t root = 0; root < cover.set_count(); ++root) {
        if (c[root]) continue;
        c[root] = 0.0;
        std::vector<std::size_t> queue{root};
        for (std::size_t h = 0; h < queue.size(); ++h) {
            const std::size_t u = queue[h];
            for (const auto& e : edges) {
                if (e.first != u && e.second != u) continue;
                const std::size_t v = e.first == u ? e.second : e.first;
                if (c[v]) continue;
                // y_ij = c_i - c_j
                c[v] = e.first == u ? *c[u] - y[e] : *c[u] + y[e];
                queue.push_back(v);
            }
        }
    }
    for (const auto& e : edges)
        if (std::abs(frac_to_nearest(y[e] - (*c[e.first] - *c[e.second]))) > tol) return false;
    return true;
}

// ---------------------------------------------------------------- fixture files

namespace {

std::vector<std::size_t> parse_ranges(const std::string& spec) {
    std::vector<std::size_t> out;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
        part = trim(part);
        if (part.empty()) continue;
        const auto dash = part.find('-');
        try {
            if (dash == std::string::npos) {
                out.push_back(std::stoul(part));
            } else {
                const auto lo = std::stoul(part.substr(0, dash)), hi = std::stoul(part.substr(dash + 1));
                if (hi < lo) throw ValidationError("empty sample range '" + part + "'");
                for (auto s = lo; s <= hi; ++s) out.push_back(s);
            }
        } catch (const std::logic_error&) {
            throw ValidationError("bad sample range '" + part + "'");
        }
    }
    return out;
}

}  // namespace

CechCover load_cover(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open cover file " + path);
    const auto dir = std::filesystem::path(path).parent_path();
    std::optional<std::size_t> sets;
    std::size_t samples = 1;
    struct Pending {
        std::size_t i, j;
        std::string value;
        int line;
    };
    std::vector<Pending> overlaps;
    std::vector<TripleComponent> triples;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw ValidationError(path + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        if (head == "sets") {
            long n;
            if (!(ls >> n) || n <= 0) fail("'sets' needs a positive count");
            sets = static_cast<std::size_t>(n);
        } else if (head == "samples") {
            long n;
            if (!(ls >> n) || n <= 0) fail("'samples' needs a positive count");
            samples = static_cast<std::size_t>(n);
        } else if (head == "triple") {
            long i, j, k;
            if (!(ls >> i >> j >> k) || i < 0 || j < 0 || k < 0) fail("'triple' needs three set indices");
            TripleComponent t{static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(k), {}};
            std::string rest;
            std::getline(ls, rest);
            rest = trim(rest);
            if (!rest.empty()) {
                if (rest[0] != '@') fail("expected '@ ranges' after triple indices");
                t.samples = parse_ranges(rest.substr(1));
                if (t.samples.empty()) fail("empty sample range list");
            }
            triples.push_back(std::move(t));
        } else {
            const auto colon = line.find(':');
            if (colon == std::string::npos) fail("unrecognized line '" + line + "'");
            std::istringstream ij(line.substr(0, colon));
            long i, j;
            std::string extra;
            if (!(ij >> i >> j) || (ij >> extra) || i < 0 || j < 0) fail("overlap line needs 'i j : value'");
            overlaps.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), trim(line.substr(colon + 1)), lineno});
        }
    }
    if (!sets) throw ValidationError(path + ": missing 'sets' line");
    CechCover cover(*sets, samples);
    for (const auto& o : overlaps) {
        lineno = o.line;
        if (cover.has_overlap(o.i, o.j)) fail("overlap given twice (q_ji = -q_ij is implied)");
        if (o.value.empty()) fail("overlap value missing");
        double c;
        if (parse_double(o.value, c)) {
            cover.set_exponent(o.i, o.j, OverlapFunction::of_constant(c));
            continue;
        }
        const auto csv = dir / o.value;
        const auto table = read_csv(csv.string(), {"sample", "value"});
        std::vector<double> s(samples, nan_v);
        for (const auto& row : table) {
            if (row[0] < 0 || row[0] != std::floor(row[0]) || row[0] >= static_cast<double>(samples))
                throw ValidationError(csv.string() + ": sample index out of range");
            s[static_cast<std::size_t>(row[0])] = row[1];
        }
        cover.set_exponent(o.i, o.j, OverlapFunction::of_samples(std::move(s)));
    }
    for (auto& t : triples) cover.add_triple(std::move(t));
    return cover;
}

void save_cover(const CechCover& cover, const std::string& path) {
    const auto p = std::filesystem::path(path);
    std::ofstream out(p);
    if (!out) throw ValidationError("cannot write cover file " + path);
    out << "sets " << cover.set_count() << "\n";
    out << "samples " << cover.sample_count() << "\n";
    for (auto [i, j] : cover.overlaps()) {
        bool sampled = false;
        for (std::size_t s = 0; s < cover.sample_count() && !sampled; ++s) sampled = std::isnan(cover.exponent(i, j, s));
        // A constant is written as such only when the stored function is constant everywhere.
        const double first = cover.exponent(i, j, 0);
        for (std::size_t s = 1; s < cover.sample_count() && !sampled; ++s) sampled = cover.exponent(i, j, s) != first;
        if (!sampled) {
            out << i << " " << j << " : " << format_double(first) << "\n";
            continue;
        }
        const std::string name = p.stem().string() + "_q" + std::to_string(i) + "_" + std::to_string(j) + ".csv";
        std::vector<std::vector<double>> rows;
        for (std::size_t s = 0; s < cover.sample_count(); ++s)
            if (const double v = cover.exponent(i, j, s); !std::isnan(v)) rows.push_back({static_cast<double>(s), v});
        write_csv((p.parent_path() / name).string(), {"sample", "value"}, rows);
        out << i << " " << j << " : " << name << "\n";
    }
    for (const auto& t : cover.triples()) {
        out << "triple " << t.i << " " << t.j << " " << t.k;
        if (!t.samples.empty()) {
            out << " @ ";
            for (std::size_t n = 0; n < t.samples.size(); ++n) out << (n ? "," : "") << t.samples[n];
        }
        out << "\n";
    }
}

namespace fixtures {

CechCover sphere_charge(double n, std::size_t samples) {
    if (samples < 16) throw ValidationError("sphere fixture needs at least 16 belt samples");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    constexpr std::size_t north = 0, a = 1, b = 2;
    const double eps = two_pi * 3.5 / static_cast<double>(samples);
    std::vector<double> qna(samples, nan_v), qnb(samples, nan_v), qab(samples, nan_v);
    std::vector<std::size_t> near_pi, near_zero;
    for (std::size_t s = 0; s < samples; ++s) {
        const double phi = two_pi * static_cast<double>(s) / static_cast<double>(samples);
        // chart A sees phi in (-eps, pi + eps), chart B sees phi in (pi - eps, 2 pi + eps)
        const bool in_a = phi < std::numbers::pi + eps || phi > two_pi - eps;
        const bool in_b = phi > std::numbers::pi - eps || phi < eps;
        const double branch_a = phi < std::numbers::pi + eps ? phi : phi - two_pi;
        const double branch_b = phi > std::numbers::pi - eps ? phi : phi + two_pi;
        if (in_a) qna[s] = n * branch_a / two_pi;
        if (in_b) qnb[s] = n * branch_b / two_pi;
        if (in_a && in_b) {
            qab[s] = 0.0;
            (std::abs(phi - std::numbers::pi) < eps ? near_pi : near_zero).push_back(s);
        }
    }
    CechCover c(3, samples);
    c.set_exponent(north, a, OverlapFunction::of_samples(qna));
    c.set_exponent(north, b, OverlapFunction::of_samples(qnb));
    c.set_exponent(a, b, OverlapFunction::of_samples(qab));
    c.add_triple({north, a, b, near_pi});
    c.add_triple({north, b, a, near_zero});
    return c;
}

CechCover circle_constant() {
    CechCover c(3);
    c.set_exponent(0, 1, OverlapFunction::of_constant(0.0));
    c.set_exponent(1, 2, OverlapFunction::of_constant(0.0));
    c.set_exponent(0, 2, OverlapFunction::of_constant(-1.0));
    c.add_triple({0, 1, 2, {}});
    return c;
}

}  // namespace fixtures

}  // namespace geoquant

#include "geoquant/io.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "geoquant/error.hpp"

namespace geoquant {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE) return false;
    out = v;
    return true;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    return out;
}

}  // namespace

std::vector<std::vector<double>> read_csv(const std::string& path, const std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open CSV file " + path);
    std::string line;
    if (!std::getline(in, line) || split_commas(line) != header) {
        std::string want;
        for (std::size_t i = 0; i < header.size(); ++i) want += (i ? "," : "") + header[i];
        throw ValidationError(path + ": expected header '" + want + "'");
    }
    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cells = split_commas(line);
        if (cells.size() != header.size())
            throw ValidationError(path + ":" + std::to_string(lineno) + ": wrong number of columns");
        std::vector<double> row(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c)
            if (!parse_double(cells[c], row[c]))
                throw ValidationError(path + ":" + std::to_string(lineno) + ": not a number '" + cells[c] + "'");
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write CSV file " + path);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << "\n";
    }
}

void write_grid_csv(const std::string& path, const PhaseGrid& grid, const std::vector<double>& values) {
    if (grid.rank() != 2) throw UnsupportedError("grid CSV is defined for d = 1");
    if (values.size() != grid.size()) throw ShapeError("sample count does not match grid");
    std::vector<std::vector<double>> rows;
    rows.reserve(values.size());
    for (std::size_t n = 0; n < values.size(); ++n) {
        const auto idx = grid.multi_index(n);
        rows.push_back({static_cast<double>(idx[0]), static_cast<double>(idx[1]), values[n]});
    }
    write_csv(path, {"q_index", "p_index", "value"}, rows);
}

std::vector<double> read_grid_csv(const std::string& path, const PhaseGrid& grid) {
    if (grid.rank() != 2) throw UnsupportedError("grid CSV is defined for d = 1");
    const auto rows = read_csv(path, {"q_index", "p_index", "value"});
    std::vector<double> values(grid.size(), 0.0);
    std::vector<bool> seen(grid.size(), false);
    for (const auto& r : rows) {
        const double qi = r[0], pi = r[1];
        if (qi < 0 || pi < 0 || qi != std::floor(qi) || pi != std::floor(pi) ||
            qi >= static_cast<double>(grid.axis(0).count) || pi >= static_cast<double>(grid.axis(1).count))
            throw ShapeError(path + ": grid index out of range");
        const std::size_t idx[2] = {static_cast<std::size_t>(qi), static_cast<std::size_t>(pi)};
        const auto n = grid.flat_index(idx);
        values[n] = r[2];
        seen[n] = true;
    }
    for (bool s : seen)
        if (!s) throw ShapeError(path + ": sampled observable must be defined on every grid node");
    return values;
}

ExperimentSpec parse_experiment(const std::string& text) {
    ExperimentSpec spec;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ValidationError("line " + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            spec[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ValidationError("line " + std::to_string(lineno) + ": empty key");
        auto& sec = spec[section];
        if (sec.count(key)) throw ValidationError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        sec[key] = trim(line.substr(eq + 1));
    }
    return spec;
}

ExperimentSpec load_experiment(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open experiment file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment(ss.str());
}

// ---------------------------------------------------------------- polynomial expressions

namespace {

class ExprParser {
public:
    ExprParser(const std::string& text, std::size_t dim) : s_(text), dim_(dim) {}

    Polynomial parse() {
        Polynomial r = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return r;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ValidationError("polynomial '" + s_ + "' at column " + std::to_string(pos_ + 1) + ": " + msg);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Polynomial expr() {
        Polynomial r = term();
        for (;;) {
            if (accept('+')) r = r + term();
            else if (accept('-')) r = r - term();
            else return r;
        }
    }

    Polynomial term() {
        Polynomial r = unary();
        for (;;) {
            if (accept('*')) {
                r = r * unary();
            } else if (accept('/')) {
                const Polynomial d = unary();
                if (d.degree() != 0 || d.is_zero()) fail("division only by nonzero constants");
                r = r * (1.0 / d.coefficient(MultiIndex(2 * dim_, 0)));
            } else {
                return r;
            }
        }
    }

    Polynomial unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Polynomial power() {
        Polynomial base = primary();
        if (!accept('^')) return base;
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("exponent must be a non-negative integer");
        const int e = std::stoi(s_.substr(start, pos_ - start));
        Polynomial r = Polynomial::constant(dim_, 1.0);
        for (int k = 0; k < e; ++k) r = r * base;
        return r;
    }

    Polynomial primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        if (accept('(')) {
            Polynomial r = expr();
            if (!accept(')')) fail("missing ')'");
            return r;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("bad number");
            pos_ += static_cast<std::size_t>(end - begin);
            return Polynomial::constant(dim_, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (name == "pi") return Polynomial::constant(dim_, std::numbers::pi);
            if ((name[0] == 'q' || name[0] == 'p')) {
                std::size_t k = 0;
                if (name.size() == 1) {
                    if (dim_ != 1) fail("use indexed variables q1..q" + std::to_string(dim_));
                } else {
                    const std::string digits = name.substr(1);
                    if (digits.find_first_not_of("0123456789") != std::string::npos) fail("unknown name '" + name + "'");
                    k = std::stoul(digits);
                    if (k < 1 || k > dim_) fail("variable index out of range in '" + name + "'");
                    --k;
                }
                return name[0] == 'q' ? Polynomial::q(dim_, k) : Polynomial::p(dim_, k);
            }
            fail("unknown name '" + name + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string s_;
    std::size_t dim_;
    std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(const std::string& text, std::size_t dim) {
    if (dim == 0) throw ValidationError("dimension must be positive");
    return ExprParser(text, dim).parse();
}

}  // namespace geoquant

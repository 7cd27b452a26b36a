#include "turnpike/problem_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace turnpike {

namespace {

struct RawEntry {
    std::string value;
    int line = 0;
    int column = 0;  // column of the value
};

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::map<std::string, RawEntry> read_entries(std::istream& in) {
    std::map<std::string, RawEntry> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (trim(line).empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected `key = value`", lineno, 1);
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError("missing key before `=`", lineno, 1);
        if (entries.count(key)) throw ParseError("duplicate key `" + key + "`", lineno, 1);

        RawEntry entry;
        entry.value = trim(line.substr(eq + 1));
        entry.line = lineno;
        const auto value_pos = line.find_first_not_of(" \t", eq + 1);
        entry.column = value_pos == std::string::npos ? static_cast<int>(eq) + 2
                                                      : static_cast<int>(value_pos) + 1;
        if (entry.value.empty())
            throw ParseError("missing value for key `" + key + "`", lineno, entry.column);
        entries[key] = entry;
    }
    return entries;
}

double parse_scalar(const std::string& token, int line, int column) {
    if (token == "inf" || token == "+inf") return std::numeric_limits<double>::infinity();
    if (token == "-inf") return -std::numeric_limits<double>::infinity();
    size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(token, &used);
    } catch (const std::exception&) {
        throw ParseError("not a number: `" + token + "`", line, column);
    }
    if (used != token.size())
        throw ParseError("trailing characters in number: `" + token + "`", line, column);
    return out;
}

std::vector<double> parse_list(const RawEntry& entry) {
    std::vector<double> out;
    std::istringstream ss(entry.value);
    std::string token;
    size_t consumed = 0;
    while (ss >> token) {
        const int column = entry.column + static_cast<int>(entry.value.find(token, consumed));
        out.push_back(parse_scalar(token, entry.line, column));
        consumed = entry.value.find(token, consumed) + token.size();
    }
    return out;
}

class EntryReader {
public:
    explicit EntryReader(std::map<std::string, RawEntry> entries) : entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    const RawEntry& require(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end())
            throw ParseError("missing required key `" + key + "`", 1, 1);
        return it->second;
    }

    double scalar(const std::string& key) const {
        const RawEntry& e = require(key);
        return parse_scalar(e.value, e.line, e.column);
    }

    int integer(const std::string& key) const {
        const double v = scalar(key);
        if (v != std::floor(v) || v < 1)
            throw ParseError("`" + key + "` must be a positive integer",
                             require(key).line, require(key).column);
        return static_cast<int>(v);
    }

    Vector vector(const std::string& key, int size) const {
        const RawEntry& e = require(key);
        const std::vector<double> values = parse_list(e);
        if (static_cast<int>(values.size()) != size)
            throw ParseError("`" + key + "` needs " + std::to_string(size) + " values, got " +
                                 std::to_string(values.size()),
                             e.line, e.column);
        return Eigen::Map<const Vector>(values.data(), size);
    }

    Matrix matrix(const std::string& key, int rows, int cols) const {
        const RawEntry& e = require(key);
        const std::vector<double> values = parse_list(e);
        if (static_cast<int>(values.size()) != rows * cols)
            throw ParseError("`" + key + "` needs " + std::to_string(rows * cols) +
                                 " row-major values, got " + std::to_string(values.size()),
                             e.line, e.column);
        Matrix out(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) out(i, j) = values[i * cols + j];
        return out;
    }

    std::string word(const std::string& key) const {
        const RawEntry& e = require(key);
        return e.value;
    }

private:
    std::map<std::string, RawEntry> entries_;
};

std::string format_value(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_matrix(std::ostream& out, const std::string& key, const Matrix& m) {
    out << key << " =";
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) out << " " << format_value(m(i, j));
    out << "\n";
}

void write_vector(std::ostream& out, const std::string& key, const Vector& v) {
    out << key << " =";
    for (int i = 0; i < v.size(); ++i) out << " " << format_value(v(i));
    out << "\n";
}

}  // namespace

ProblemFile parse_problem_file(std::istream& in) {
    const EntryReader reader(read_entries(in));

    const int n = reader.integer("n");
    const int m = reader.integer("m");
    const int q = reader.has("q") ? reader.integer("q") : n;

    const Matrix a = reader.matrix("A", n, n);
    const Matrix b = reader.matrix("B", n, m);
    const Matrix c = reader.has("C") ? reader.matrix("C", q, n) : Matrix::Identity(n, n);
    const Vector z = reader.has("z") ? reader.vector("z", q) : Vector::Zero(q);

    ConstraintSet constraints;
    const std::string kind = reader.has("constraint") ? reader.word("constraint") : "fullspace";
    if (kind == "fullspace") {
        constraints = ConstraintSet::full_space();
    } else if (kind == "box") {
        constraints = ConstraintSet::box(reader.vector("lo", m), reader.vector("hi", m));
    } else if (kind == "ball") {
        constraints = ConstraintSet::ball(reader.vector("center", m), reader.scalar("radius"));
    } else {
        const RawEntry& e = reader.require("constraint");
        throw ParseError("unknown constraint kind `" + kind + "`", e.line, e.column);
    }

    FinalCost final_cost;
    const std::string gk = reader.has("final_cost") ? reader.word("final_cost") : "zero";
    if (gk == "zero") {
        final_cost = FinalCost::zero();
    } else if (gk == "quadratic") {
        final_cost = FinalCost::quadratic(reader.matrix("QT", n, n), reader.vector("zT", n));
    } else if (gk == "quartic") {
        final_cost = FinalCost::quartic_double_well(reader.scalar("eps"));
    } else {
        const RawEntry& e = reader.require("final_cost");
        throw ParseError("unknown final cost kind `" + gk + "`", e.line, e.column);
    }

    ProblemFile out{LqProblem(a, b, c, z, constraints, final_cost),
                    reader.has("tol") ? reader.scalar("tol") : 1e-9};
    if (!(out.tol > 0.0)) {
        const RawEntry& e = reader.require("tol");
        throw ParseError("`tol` must be positive", e.line, e.column);
    }
    return out;
}

ProblemFile parse_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open problem file: " + path);
    return parse_problem_file(in);
}

void write_problem_file(std::ostream& out, const LqProblem& p, double tol) {
    out << "# constrained linear-quadratic tracking problem\n";
    out << "n = " << p.n() << "\n";
    out << "m = " << p.m() << "\n";
    out << "q = " << p.q() << "\n";
    write_matrix(out, "A", p.a());
    write_matrix(out, "B", p.b());
    write_matrix(out, "C", p.c());
    write_vector(out, "z", p.z());

    if (const Box* box = std::get_if<Box>(&p.constraints().variant())) {
        out << "constraint = box\n";
        write_vector(out, "lo", box->lo);
        write_vector(out, "hi", box->hi);
    } else if (const Ball* ball = std::get_if<Ball>(&p.constraints().variant())) {
        out << "constraint = ball\n";
        write_vector(out, "center", ball->center);
        out << "radius = " << format_value(ball->radius) << "\n";
    } else {
        out << "constraint = fullspace\n";
    }

    if (const QuadraticCost* g = std::get_if<QuadraticCost>(&p.final_cost().variant())) {
        out << "final_cost = quadratic\n";
        write_matrix(out, "QT", g->q_t);
        write_vector(out, "zT", g->z_t);
    } else if (const QuarticDoubleWell* g =
                   std::get_if<QuarticDoubleWell>(&p.final_cost().variant())) {
        out << "final_cost = quartic\n";
        out << "eps = " << format_value(g->eps) << "\n";
    } else {
        out << "final_cost = zero\n";
    }
    out << "tol = " << format_value(tol) << "\n";
}

void write_problem_file(const std::string& path, const LqProblem& p, double tol) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot open output file: " + path);
    write_problem_file(out, p, tol);
}

std::vector<std::string> example_problem_names() {
    return {"scalar_integrator", "scalar_stable", "scalar_saturated", "double_well", "planar"};
}

LqProblem example_problem(const std::string& name) {
    Matrix one(1, 1);
    one << 1.0;
    Vector z1(1);

    if (name == "scalar_integrator") {
        // A = 0: the analytic family with V(x,T) = x^2 tanh(T)/2.
        Matrix a(1, 1);
        a << 0.0;
        z1 << 0.0;
        return LqProblem(a, one, one, z1);
    }
    if (name == "scalar_stable") {
        Matrix a(1, 1);
        a << -1.0;
        z1 << 1.0;
        return LqProblem(a, one, one, z1);
    }
    if (name == "scalar_saturated") {
        // The steady optimum saturates the box at u = 0.2.
        Matrix a(1, 1);
        a << -1.0;
        z1 << 1.0;
        Vector lo(1), hi(1);
        lo << 0.0;
        hi << 0.2;
        return LqProblem(a, one, one, z1, ConstraintSet::box(lo, hi));
    }
    if (name == "double_well") {
        Matrix a(1, 1);
        a << -1.0;
        z1 << 0.0;
        return LqProblem(a, one, one, z1, ConstraintSet::full_space(),
                         FinalCost::quartic_double_well(0.05));
    }
    if (name == "planar") {
        Matrix a(2, 2);
        a << -1.0, 1.0, 0.0, -1.5;
        Matrix b(2, 1);
        b << 0.0, 1.0;
        Matrix c = Matrix::Identity(2, 2);
        Vector z(2);
        z << 0.5, -0.25;
        return LqProblem(a, b, c, z);
    }
    throw InvalidArgument("unknown example problem: " + name);
}

}  // namespace turnpike

#pragma once

#include "turnpike/errors.hpp"
#include "turnpike/model.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace turnpike {

/// Parsed problem file: the problem plus the file-level numeric tolerance.
struct ProblemFile {
    LqProblem problem;
    double tol = 1e-9;
};

/// Reads the line-based `key = value` problem format:
///
///   # comment
///   n = 1
///   m = 1
///   A = -1            (row-major, n*n values)
///   B = 1             (n*m values)
///   C = 1             (q*n values; q defaults to n)
///   z = 1             (q values)
///   constraint = box  (fullspace | box | ball)
///   lo = 0            (box: m values, -inf allowed)
///   hi = 0.2          (box: m values, inf allowed)
///   final_cost = zero (zero | quadratic | quartic)
///   tol = 1e-9
///
/// quadratic uses `QT` (n*n) and `zT` (n); ball uses `center` (m) and
/// `radius`; quartic uses `eps`. Values are decimal floating point; no
/// bit-exactness is promised. Throws ParseError with line/column positions.
ProblemFile parse_problem_file(std::istream& in);
ProblemFile parse_problem_file(const std::string& path);

/// Writes a file that parses back to an equal problem.
void write_problem_file(std::ostream& out, const LqProblem& problem, double tol = 1e-9);
void write_problem_file(const std::string& path, const LqProblem& problem, double tol = 1e-9);

/// Built-in example problems, keyed by name.
std::vector<std::string> example_problem_names();
LqProblem example_problem(const std::string& name);

}  // namespace turnpike

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "turnpike/errors.hpp"
#include "turnpike/problem_io.hpp"

#include <sstream>

using namespace turnpike;

namespace {

bool problems_equal(const LqProblem& a, const LqProblem& b) {
    if (a.a() != b.a() || a.b() != b.b() || a.c() != b.c() || a.z() != b.z()) return false;
    if (a.constraints().variant().index() != b.constraints().variant().index()) return false;
    if (const Box* ba = std::get_if<Box>(&a.constraints().variant())) {
        const Box* bb = std::get_if<Box>(&b.constraints().variant());
        if (ba->lo != bb->lo || ba->hi != bb->hi) return false;
    }
    if (const Ball* ba = std::get_if<Ball>(&a.constraints().variant())) {
        const Ball* bb = std::get_if<Ball>(&b.constraints().variant());
        if (ba->center != bb->center || ba->radius != bb->radius) return false;
    }
    if (a.final_cost().variant().index() != b.final_cost().variant().index()) return false;
    if (const QuadraticCost* qa = std::get_if<QuadraticCost>(&a.final_cost().variant())) {
        const QuadraticCost* qb = std::get_if<QuadraticCost>(&b.final_cost().variant());
        if (qa->q_t != qb->q_t || qa->z_t != qb->z_t) return false;
    }
    if (const QuarticDoubleWell* qa =
            std::get_if<QuarticDoubleWell>(&a.final_cost().variant())) {
        const QuarticDoubleWell* qb = std::get_if<QuarticDoubleWell>(&b.final_cost().variant());
        if (qa->eps != qb->eps) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("every built-in example round-trips through the file format") {
    for (const std::string& name : example_problem_names()) {
        const LqProblem original = example_problem(name);
        std::stringstream buffer;
        write_problem_file(buffer, original, 2.5e-10);
        const ProblemFile parsed = parse_problem_file(buffer);
        CHECK_MESSAGE(problems_equal(original, parsed.problem), "example: ", name);
        CHECK(parsed.tol == 2.5e-10);
    }
}

TEST_CASE("quadratic final costs round-trip") {
    Matrix qt(2, 2);
    qt << 2.0, 0.25, 0.25, 1.0;
    Vector zt(2);
    zt << 0.1, -0.3;
    const LqProblem p = example_problem("planar").with_final_cost(FinalCost::quadratic(qt, zt));
    std::stringstream buffer;
    write_problem_file(buffer, p);
    CHECK(problems_equal(p, parse_problem_file(buffer).problem));
}

TEST_CASE("parser reads a handwritten file with comments and infinities") {
    std::stringstream in(R"(# saturated tracker
n = 1
m = 1
A = -1       # row-major
B = 1
C = 1
z = 1
constraint = box
lo = -inf
hi = 0.2
final_cost = zero
tol = 1e-10
)");
    const ProblemFile file = parse_problem_file(in);
    CHECK(file.problem.n() == 1);
    CHECK(file.problem.a()(0, 0) == -1.0);
    const Box* box = std::get_if<Box>(&file.problem.constraints().variant());
    REQUIRE(box != nullptr);
    CHECK(std::isinf(box->lo(0)));
    CHECK(box->hi(0) == 0.2);
    CHECK(file.tol == 1e-10);
}

TEST_CASE("parse errors carry line and column positions") {
    SUBCASE("missing key") {
        std::stringstream in("n = 1\nm = 1\nB = 1\n");
        CHECK_THROWS_AS(parse_problem_file(in), ParseError);
    }
    SUBCASE("bad number") {
        std::stringstream in("n = 1\nm = 1\nA = fish\nB = 1\n");
        try {
            parse_problem_file(in);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
            CHECK(e.column() >= 5);
        }
    }
    SUBCASE("wrong element count") {
        std::stringstream in("n = 2\nm = 1\nA = 1 2 3\nB = 1 1\n");
        try {
            parse_problem_file(in);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("unknown constraint kind") {
        std::stringstream in("n = 1\nm = 1\nA = -1\nB = 1\nconstraint = cone\n");
        CHECK_THROWS_AS(parse_problem_file(in), ParseError);
    }
    SUBCASE("duplicate key") {
        std::stringstream in("n = 1\nn = 2\nm = 1\nA = -1\nB = 1\n");
        CHECK_THROWS_AS(parse_problem_file(in), ParseError);
    }
    SUBCASE("line without equals sign") {
        std::stringstream in("n = 1\nm 1\nA = -1\nB = 1\n");
        try {
            parse_problem_file(in);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("nonpositive tol") {
        std::stringstream in("n = 1\nm = 1\nA = -1\nB = 1\ntol = 0\n");
        CHECK_THROWS_AS(parse_problem_file(in), ParseError);
    }
}

TEST_CASE("defaults: C = identity, z = 0, unconstrained, zero final cost") {
    std::stringstream in("n = 2\nm = 1\nA = -1 0 0 -2\nB = 1 1\n");
    const ProblemFile file = parse_problem_file(in);
    CHECK(file.problem.c() == Matrix::Identity(2, 2));
    CHECK(file.problem.z() == Vector::Zero(2));
    CHECK(file.problem.constraints().is_full_space());
    CHECK(file.problem.final_cost().is_zero());
    CHECK(file.tol == 1e-9);
}

TEST_CASE("unknown example names are rejected") {
    CHECK_THROWS_AS(example_problem("no_such_example"), InvalidArgument);
}

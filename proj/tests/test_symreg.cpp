#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "lmpso/llm/mock_backend.hpp"
#include "lmpso/swarm/engine.hpp"
#include "lmpso/symreg/adapter.hpp"
#include "lmpso/symreg/dataset.hpp"
#include "lmpso/symreg/eval.hpp"
#include "lmpso/symreg/expr.hpp"
#include "lmpso/symreg/metrics.hpp"

using namespace lmpso;
using namespace lmpso::symreg;

namespace {

Dataset grid_dataset(std::size_t rows_per_axis, double (*f)(double, double)) {
  Dataset d;
  d.name = "grid";
  d.dim = 2;
  for (std::size_t i = 0; i < rows_per_axis; ++i) {
    for (std::size_t j = 0; j < rows_per_axis; ++j) {
      const double a = static_cast<double>(i), b = static_cast<double>(j);
      d.X.push_back(a);
      d.X.push_back(b);
      d.y.push_back(f(a, b));
    }
  }
  d.feature_names = {"x0", "x1"};
  return d;
}

double square_corner(double, double x1) { return 20.0 - 2.0 * std::abs(x1 - 10.0); }

}  // namespace

TEST_CASE("parser builds the expected tree") {
  const auto e = parse_expr("20 - 2*abs(x1 - 10)", 2);
  const auto expected = Expr::binary(
      BinaryOp::sub, Expr::constant(20),
      Expr::binary(BinaryOp::mul, Expr::constant(2),
                   Expr::unary(UnaryOp::abs, Expr::binary(BinaryOp::sub, Expr::variable(1), Expr::constant(10)))));
  CHECK(e == expected);
  CHECK(e.size() == 8);
  CHECK(parse_expr("x0", 1) == Expr::variable(0));
  CHECK(parse_expr("ABS(x0)", 1) == parse_expr("abs(x0)", 1));
  CHECK(parse_expr("2 ** 3", 1) == parse_expr("2^3", 1));
}

TEST_CASE("parser precedence") {
  // Power binds tighter than unary minus, which binds tighter than '*'.
  CHECK(parse_expr("-x0^2", 1) ==
        Expr::unary(UnaryOp::neg, Expr::binary(BinaryOp::pow, Expr::variable(0), Expr::constant(2))));
  CHECK(parse_expr("2^3^2", 1) ==
        Expr::binary(BinaryOp::pow, Expr::constant(2), Expr::binary(BinaryOp::pow, Expr::constant(3), Expr::constant(2))));
  CHECK(parse_expr("1 + 2 * 3", 1) ==
        Expr::binary(BinaryOp::add, Expr::constant(1), Expr::binary(BinaryOp::mul, Expr::constant(2), Expr::constant(3))));
  CHECK(parse_expr("8 - 3 - 2", 1) ==
        Expr::binary(BinaryOp::sub, Expr::binary(BinaryOp::sub, Expr::constant(8), Expr::constant(3)), Expr::constant(2)));
  CHECK(eval_expr(parse_expr("8 / 4 / 2", 1), std::vector<double>{0}) == 1.0);
}

TEST_CASE("parser errors") {
  auto kind_of = [](std::string_view text, std::size_t dim) {
    try {
      parse_expr(text, dim);
    } catch (const ExprError& e) {
      return e.kind();
    }
    FAIL("expected an error for ", text);
    return ExprError::Kind::parse_error;
  };
  CHECK(kind_of("x99 + 1", 2) == ExprError::Kind::unknown_variable);
  CHECK(kind_of("x2", 2) == ExprError::Kind::unknown_variable);
  CHECK(kind_of("foo(x0)", 2) == ExprError::Kind::unknown_function);
  CHECK(kind_of("|x0|", 2) == ExprError::Kind::parse_error);
  CHECK(kind_of("x0 +", 2) == ExprError::Kind::parse_error);
  CHECK(kind_of("(x0", 2) == ExprError::Kind::parse_error);
  CHECK(kind_of("", 2) == ExprError::Kind::parse_error);
  CHECK(kind_of("x0 x1", 2) == ExprError::Kind::parse_error);
  CHECK(kind_of("max(x0)", 2) == ExprError::Kind::parse_error);
  try {
    parse_expr("x0 + * x1", 2);
  } catch (const ExprError& e) {
    CHECK(e.position() == 5);
  }
}

TEST_CASE("protected division example round-trips and evaluates to 1") {
  const auto e = parse_expr("max(x0, min(x1, 3.5)) / (x0 - x0)", 2);
  CHECK(parse_expr(to_string(e), 2) == e);
  EvalNotes notes;
  CHECK(eval_expr(e, std::vector<double>{4, 1}, &notes) == 1.0);
  CHECK(notes.zero_division == 1);
}

TEST_CASE("evaluation examples and protection rules") {
  const auto corner = parse_expr("20 - 2*abs(x1 - 10)", 2);
  for (double x0 : {-5.0, 0.0, 123.0}) CHECK(eval_expr(corner, std::vector<double>{x0, 10}) == 20.0);
  const std::vector<double> row{3.0, -4.0};
  CHECK(eval_expr(parse_expr("1/(x0 - x0)", 2), row) == 1.0);
  CHECK(eval_expr(parse_expr("inv(x0 - x0)", 2), row) == 1.0);
  CHECK(eval_expr(parse_expr("log(x0 - x0)", 2), row) == 0.0);
  CHECK(eval_expr(parse_expr("log(x1)", 2), row) == doctest::Approx(std::log(4.0)));
  CHECK(eval_expr(parse_expr("sqrt(x1)", 2), row) == 2.0);
  CHECK(eval_expr(parse_expr("10^400", 2), row) == kPowClamp);
  CHECK(eval_expr(parse_expr("-(10^401)", 2), row) == -kPowClamp);
  CHECK(eval_expr(parse_expr("x1^0.5", 2), row) == 0.0);
  CHECK(eval_expr(parse_expr("exp(1000)", 2), row) == 0.0);
  CHECK(eval_expr(parse_expr("max(x0, x1) + min(x0, x1)", 2), row) == -1.0);
  EvalNotes notes;
  eval_expr(parse_expr("exp(1000) + 10^400 + log(0) + 1/0", 2), row, &notes);
  CHECK(notes.non_finite == 1);
  CHECK(notes.pow_clamped == 1);
  CHECK(notes.log_zero == 1);
  CHECK(notes.zero_division == 1);
  CHECK(notes.fallbacks() == 4);
}

TEST_CASE("print-then-parse round trip on random expressions") {
  Rng rng = make_stream(1, "test.expr");
  for (int k = 0; k < 10000; ++k) {
    const auto e = oracle::random_expr(rng, 3, 5);
    const auto text = to_string(e);
    const auto back = parse_expr(text, 3);
    CHECK_MESSAGE(back == e, text);
    if (back != e) break;
  }
}

TEST_CASE("compiled evaluation matches the tree-walking oracle") {
  Rng rng = make_stream(2, "test.expr");
  std::size_t mismatches = 0;
  for (int k = 0; k < 10000; ++k) {
    const auto e = oracle::random_expr(rng, 3, 6);
    std::vector<double> row(3);
    for (auto& v : row) v = (static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5) * 40.0;
    const double got = eval_expr(e, row);
    const double want = oracle::walk(e, row);
    const bool ok = got == want || std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want));
    if (!ok) ++mismatches;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("evaluation is total over a fuzz sweep") {
  Rng rng = make_stream(3, "test.expr");
  const double specials[] = {0.0, -0.0, 1e308, -1e308, 1e-308, std::nan(""), INFINITY, -INFINITY, -1.0};
  for (int k = 0; k < 5000; ++k) {
    const auto e = oracle::random_expr(rng, 2, 7);
    const CompiledExpr f(e);
    for (double a : specials) {
      for (double b : {0.0, -2.5, 1e300}) {
        CHECK(std::isfinite(f(std::vector<double>{a, b})));
      }
    }
  }
}

TEST_CASE("deep expressions use the heap stack") {
  Expr e = Expr::variable(0);
  for (int k = 0; k < 200; ++k) e = Expr::binary(BinaryOp::add, Expr::constant(1), std::move(e));
  CHECK(eval_expr(e, std::vector<double>{0.5}) == 200.5);
  CHECK_THROWS_AS(eval_expr(Expr::variable(3), std::vector<double>{1.0}), std::out_of_range);
}

TEST_CASE("node count is monotone under subtree removal") {
  Rng rng = make_stream(4, "test.expr");
  for (int k = 0; k < 500; ++k) {
    const auto e = oracle::random_expr(rng, 2, 5);
    for (const auto& c : e.children) CHECK(c.size() < e.size());
    CHECK(e.size() >= 1);
  }
}

TEST_CASE("fit metrics") {
  Dataset d;
  d.dim = 1;
  for (int i = 0; i < 10; ++i) {
    d.X.push_back(i);
    d.y.push_back(2.0 * i + 1.0);
  }
  auto exact = fit_metrics(parse_expr("2*x0 + 1", 1), d);
  CHECK(exact.mae <= 1e-12);
  CHECK(*exact.r2 == doctest::Approx(1.0));
  CHECK(exact.length == 5);
  auto mean = fit_metrics(parse_expr("10", 1), d);
  CHECK(*mean.r2 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mean.mae == doctest::Approx(5.0));
  auto worse = fit_metrics(parse_expr("x0 * 100", 1), d);
  CHECK(*worse.r2 < 0.0);

  Dataset flat = d;
  std::fill(flat.y.begin(), flat.y.end(), 3.0);
  CHECK_FALSE(fit_metrics(parse_expr("x0", 1), flat).r2.has_value());
}

TEST_CASE("parallel metrics equal the serial reference") {
  Rng rng = make_stream(5, "test.expr");
  Dataset d;
  d.dim = 3;
  for (int i = 0; i < 5000; ++i) {
    for (int j = 0; j < 3; ++j) d.X.push_back((static_cast<double>(rng() >> 11) * 0x1.0p-53) * 10.0);
    d.y.push_back(static_cast<double>(rng() >> 11) * 0x1.0p-53);
  }
  for (int k = 0; k < 50; ++k) {
    const auto e = oracle::random_expr(rng, 3, 4);
    const auto a = fit_metrics(e, d);
    const auto b = fit_metrics_serial(e, d);
    CHECK(a.mae == doctest::Approx(b.mae).epsilon(1e-12));
    CHECK(a.r2.has_value() == b.r2.has_value());
    if (a.r2 && b.r2 && std::isfinite(*b.r2)) CHECK(*a.r2 == doctest::Approx(*b.r2).epsilon(1e-9));
    CHECK(a.length == b.length);
    CHECK(a.notes.fallbacks() == b.notes.fallbacks());
    // Same answer twice: the reduction order is fixed.
    CHECK(fit_metrics(e, d).mae == a.mae);
    CHECK(mean_absolute_error(CompiledExpr(e), d) == a.mae);
  }
}

TEST_CASE("CSV loading") {
  const auto d = parse_csv("a,b,target\n1,2,3\n4,5,6\n7,8,9\n10,11,12\n13,14,15\n", "t");
  CHECK(d.dim == 2);
  CHECK(d.rows() == 5);
  CHECK(d.y.back() == 15.0);
  CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
  const auto tab = parse_csv("a\tb\ttarget\n1\t2\t3\n4\t5\t6\n7\t8\t9\n10\t11\t12\n13\t14\t15\n", "t");
  CHECK(tab == d);
  CHECK_THROWS_AS(parse_csv("a,b,y\n", "t"), SchemaError);
  try {
    parse_csv("a,b,y\n1,2,3\n\n1,oops,3\n", "t");
    FAIL("expected a schema error");
  } catch (const SchemaError& e) {
    CHECK(e.row() == 4);
    CHECK(e.col() == 1);
  }
  CHECK_THROWS_AS(parse_csv("a,b,y\n1,2\n", "t"), SchemaError);
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), IoError);

  const auto round = parse_csv(to_csv(d), "t");
  CHECK(round.X == d.X);
  CHECK(round.y == d.y);

  const auto dir = std::filesystem::temp_directory_path() / "lmpso_csv_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "tiny.csv") << "x,y\n0.1,0.2\n";
  const auto loaded = load_csv(dir / "tiny.csv");
  CHECK(loaded.name == "tiny");
  CHECK(loaded.y == std::vector<double>{0.2});
  std::filesystem::remove_all(dir);
}

TEST_CASE("expression extraction from replies") {
  CHECK(*extract_expression("y = 20 - 2*abs(x1 - 10)", 2).expr == parse_expr("20 - 2*abs(x1 - 10)", 2));
  CHECK(*extract_expression("Here is my answer:\n```\nx0 + x1\n```\nIt is simple.", 2).expr ==
        parse_expr("x0 + x1", 2));
  CHECK(*extract_expression("Expression: `x0 * 2`.", 2).expr == parse_expr("x0 * 2", 2));
  const auto bad = extract_expression("x99 + 1", 2);
  CHECK_FALSE(bad.expr);
  CHECK(bad.constraint_error);
  const auto prose = extract_expression("I cannot find one.", 2);
  CHECK_FALSE(prose.expr);
  CHECK_FALSE(prose.constraint_error);
}

TEST_CASE("symbolic regression adapter") {
  SymregAdapter adapter(grid_dataset(21, square_corner));
  using K = swarm::Violation::Kind;

  auto ok = adapter.parse_and_validate("20 - 2*abs(x1 - 10)");
  REQUIRE(swarm::is_valid(ok));
  CHECK(adapter.evaluate(std::get<Expr>(ok)) == 0.0);
  auto rough = std::get<Expr>(adapter.parse_and_validate("y = 10"));
  CHECK(adapter.evaluate(rough) == doctest::Approx(fit_metrics(rough, adapter.dataset()).mae));

  CHECK(std::get<swarm::Violation>(adapter.parse_and_validate("x99 + 1")).kind == K::constraint_violation);
  CHECK(std::get<swarm::Violation>(adapter.parse_and_validate("no idea")).kind == K::parse_failure);
  CHECK(std::get<swarm::Violation>(adapter.parse_and_validate("1/(x0 - x0)")).kind == K::probe_failure);

  Rng a = make_stream(9, "symreg.sample");
  Rng b = make_stream(9, "symreg.sample");
  const auto s1 = adapter.sample_indices(a);
  CHECK(s1.size() == 20);
  CHECK(s1 == adapter.sample_indices(b));
  std::vector<std::size_t> sorted = s1;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  CHECK(adapter.probe_indices().size() == 5);
  CHECK(adapter.format_samples({0}) == "(x0=0, x1=0) -> y=0");

  Rng c = make_stream(9, "symreg.describe");
  const auto desc = adapter.describe(c);
  CHECK(desc.find("Use these operators if necessary") != std::string::npos);
  CHECK(desc.find(" -> y=") != std::string::npos);
  CHECK(std::count(desc.begin(), desc.end(), '\n') >= 20);

  llm::MockBackend mock(llm::MockScript::cyclic({"20 - 2*abs(x1 - 10)"}));
  Rng d = make_stream(9, "symreg.init");
  CHECK(adapter.initial_position(d, mock, {}) == "20 - 2*abs(x1 - 10)");
  CHECK(mock.query_count() == 1);

  const auto vel = adapter.construct_velocity(swarm::Candidate<Expr>{"x0", Expr::variable(0), 3.5},
                                              swarm::Candidate<Expr>{"x1", Expr::variable(1), 1.25});
  CHECK(vel.text.find("3.5") != std::string::npos);
  CHECK(vel.text.find("1.25") != std::string::npos);
  CHECK(vel.text.find("lower MAE") != std::string::npos);
  Rng e = make_stream(9, "render");
  const auto prompt = adapter.render({0, "inertia", "x0", vel.text, e});
  CHECK(llm::MetaPrompt::check(prompt.messages()).empty());
}

TEST_CASE("small datasets use every row in the prompt sample") {
  SymregAdapter adapter(grid_dataset(3, square_corner));
  Rng rng = make_stream(1, "s");
  CHECK(adapter.sample_indices(rng).size() == 9);
}

TEST_CASE("size caps reject oversized expressions") {
  SymregOptions opts;
  opts.max_nodes = 5;
  SymregAdapter adapter(grid_dataset(5, square_corner), opts);
  CHECK(swarm::is_valid(adapter.parse_and_validate("x0 + x1")));
  CHECK(std::get<swarm::Violation>(adapter.parse_and_validate("x0 + x1 + x0 + x1")).kind ==
        swarm::Violation::Kind::constraint_violation);
}

TEST_CASE("swarm run on the square-corner task finds the scripted expression") {
  SymregAdapter adapter(grid_dataset(21, square_corner));
  llm::MockBackend mock(llm::MockScript::cyclic({"x0 + x1", "y = 20 - x1", "20 - 2*abs(x1 - 10)", "garbage"}));
  swarm::SwarmConfig cfg;
  cfg.num_particles = 3;
  cfg.max_iterations = 4;
  cfg.rng_seed = 1;
  const auto res = swarm::run(adapter, mock, cfg);
  CHECK(res.gbest.score == 0.0);
  CHECK(res.queries >= 3 * 4 + 3);
}

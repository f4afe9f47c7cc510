#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "dynkc/metric.hpp"
#include "dynkc/stream.hpp"

using namespace dynkc;

TEST_CASE("euclidean metric basics") {
  MetricSpace m(2);
  m.add_point(0, {0.0, 0.0});
  m.add_point(1, {3.0, 4.0});
  CHECK(m.dist(0, 1) == doctest::Approx(5.0));
  CHECK(m.dist(1, 0) == doctest::Approx(5.0));
  CHECK(m.dist(0, 0) == 0.0);
  CHECK(m.live_count() == 2);
  CHECK(m.is_live(1));
  CHECK_FALSE(m.is_live(2));

  SUBCASE("every dist call counts one evaluation") {
    m.reset_evals();
    (void)m.dist(0, 1);
    (void)m.dist(1, 0);
    (void)m.dist(0, 0);
    CHECK(m.evals() == 3);
  }

  SUBCASE("coordinates survive deletion") {
    m.remove_point(1);
    CHECK_FALSE(m.is_live(1));
    CHECK(m.known(1));
    CHECK(m.live_count() == 1);
    // rebuild snapshots still measure against removed points
    CHECK(m.dist(0, 1) == doctest::Approx(5.0));
  }

  SUBCASE("id reuse and bad removals are rejected") {
    CHECK_THROWS_AS(m.add_point(0, {1.0, 1.0}), ValidationError);
    m.remove_point(1);
    CHECK_THROWS_AS(m.remove_point(1), ValidationError);
    CHECK_THROWS_AS(m.remove_point(9), ValidationError);
  }

  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(m.add_point(2, {1.0}), ValidationError);
    CHECK_THROWS_AS(m.add_point(2, {1.0, 2.0, 3.0}), ValidationError);
  }
}

TEST_CASE("dimension inferred from the first point") {
  MetricSpace m;  // dim 0
  m.add_point(0, {1.0, 2.0, 3.0});
  CHECK(m.dim() == 3);
  CHECK_THROWS_AS(m.add_point(1, {1.0, 2.0}), ValidationError);
  m.add_point(1, {1.0, 2.0, 4.0});
  CHECK(m.dist(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("matrix mode distances and validation") {
  // path metric on a line: d(i,j) = |i-j|
  std::vector<std::vector<double>> line = {
      {0, 1, 2}, {1, 0, 1}, {2, 1, 0}};
  MetricSpace m = MetricSpace::from_matrix(line);
  CHECK(m.matrix_mode());
  m.add_point(0, {});
  m.add_point(2, {});
  CHECK(m.dist(0, 2) == 2.0);

  SUBCASE("ids must index matrix rows and carry no coordinates") {
    CHECK_THROWS_AS(m.add_point(3, {}), ValidationError);
    CHECK_THROWS_AS(m.add_point(1, {1.0}), ValidationError);
  }

  SUBCASE("malformed matrices are rejected") {
    CHECK_THROWS_AS(MetricSpace::from_matrix({{0, 1}, {1, 0}, {2, 1}}), ValidationError);
    CHECK_THROWS_AS(MetricSpace::from_matrix({{0, 1}, {2, 0}}), ValidationError);
    CHECK_THROWS_AS(MetricSpace::from_matrix({{1, 1}, {1, 0}}), ValidationError);
    CHECK_THROWS_AS(MetricSpace::from_matrix({{0, -1}, {-1, 0}}), ValidationError);
    // 0-2 edge longer than the 0-1-2 path
    CHECK_THROWS_AS(MetricSpace::from_matrix({{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}),
                    ValidationError);
  }
}

TEST_CASE("dist_to_set ties go to the smaller id") {
  MetricSpace m(1);
  m.add_point(0, {0.0});
  m.add_point(1, {2.0});
  m.add_point(2, {-2.0});
  std::vector<PointId> S = {2, 1};
  auto r = dist_to_set(m, 0, S);
  CHECK(r.dist == 2.0);
  REQUIRE(r.witness.has_value());
  CHECK(*r.witness == 1);

  auto empty = dist_to_set(m, 0, std::vector<PointId>{});
  CHECK(std::isinf(empty.dist));
  CHECK_FALSE(empty.witness.has_value());
}

TEST_CASE("ball boundary is closed by default, open on request") {
  MetricSpace m(1);
  for (PointId i = 0; i < 5; ++i) m.add_point(i, {double(i)});
  std::vector<PointId> U = {0, 1, 2, 3, 4};
  std::vector<PointId> S = {0};
  CHECK(ball(m, U, S, 2.0) == std::vector<PointId>{0, 1, 2});
  CHECK(ball(m, U, S, 2.0, /*closed=*/false) == std::vector<PointId>{0, 1});
}

TEST_CASE("format_double uses shortest round-trip form") {
  CHECK(format_double(5.0) == "5");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-2.5) == "-2.5");
  for (double v : {66.82002814491965, 1e-9, 1.0 / 3.0, 123456.789}) {
    std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("stream parse and canonical round-trip") {
  std::string text =
      "#dim 2\n"
      "+ 0 0.5 1.5\n"
      "+ 1 66.82002814491965 0.1\n"
      "- 0\n"
      "+ 4 -3 1e-09\n";
  Stream s = parse_stream(text);
  CHECK(s.dim == 2);
  REQUIRE(s.events.size() == 4);
  CHECK(s.events[0] == UpdateEvent{UpdateEvent::Kind::kInsert, 0, {0.5, 1.5}});
  CHECK(s.events[2] == UpdateEvent{UpdateEvent::Kind::kDelete, 0, {}});
  CHECK(s.events[3].id == 4);
  CHECK(serialize_stream(s) == text);
}

TEST_CASE("matrix-mode streams carry bare insertions") {
  std::string text =
      "#matrix dists.txt\n"
      "+ 0\n"
      "+ 1\n"
      "- 1\n";
  Stream s = parse_stream(text);
  CHECK(s.matrix_mode());
  CHECK(s.matrix_path == "dists.txt");
  CHECK(serialize_stream(s) == text);
  CHECK_THROWS_AS(parse_stream("#matrix m.txt\n+ 0 1.0\n"), ParseError);
}

static std::size_t error_line(const std::string& text) {
  try {
    parse_stream(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

TEST_CASE("stream parser rejects malformed input with line numbers") {
  CHECK(error_line("#dim 2\n+ 0  1 2\n") == 2);           // double space
  CHECK(error_line("#dim 2\n+ 0 1 2\n\n+ 1 1 2\n") == 3); // blank line
  CHECK(error_line("#dim 2\n+ 0 1 2\n#dim 2\n") == 3);    // header after events
  CHECK(error_line("#dim 2\n#dim 2\n") == 2);
  CHECK(error_line("#dim 2\n#matrix m.txt\n") == 2);
  CHECK(error_line("#dim 0\n") == 1);
  CHECK(error_line("#weird 1\n") == 1);
  CHECK(error_line("+ x 1\n") == 1);                      // bad id
  CHECK(error_line("+ 3 1\n+ 3 2\n") == 2);               // ids not increasing
  CHECK(error_line("+ 3 1\n+ 1 2\n") == 2);
  CHECK(error_line("+ 0 1 2\n+ 1 1\n") == 2);             // dim mismatch
  CHECK(error_line("+ 0\n") == 1);                        // euclidean needs coords
  CHECK(error_line("- 0\n") == 1);                        // delete before insert
  CHECK(error_line("+ 0 1\n- 0\n- 0\n") == 3);            // double delete
  CHECK(error_line("+ 0 1\n- 0 0\n") == 2);               // deletion arity
  CHECK(error_line("* 0\n") == 1);                        // unknown event
  CHECK(error_line("+ 0 inf\n") == 1);                    // non-finite real
  CHECK(error_line("+ 0 nan\n") == 1);
}

TEST_CASE("matrix file parsing") {
  auto m = parse_matrix("3\n0 1 2\n1 0 1\n2 1 0\n");
  REQUIRE(m.size() == 3);
  CHECK(m[2][0] == 2.0);
  CHECK_THROWS_AS(parse_matrix("0\n"), ValidationError);
  CHECK_THROWS_AS(parse_matrix("2\n0 1\n1\n"), ValidationError);
  CHECK_THROWS_AS(parse_matrix("2\n0 1\n1 0\n7\n"), ValidationError);
  CHECK_THROWS_AS(parse_matrix("nope\n"), ValidationError);
}

TEST_CASE("generator is deterministic in its seed") {
  GeneratorConfig cfg;
  cfg.n_init = 20;
  cfg.dim = 3;
  cfg.seed = 42;
  StreamGenerator a(cfg), b(cfg);
  CHECK(a.initial_events() == b.initial_events());
  CHECK(a.initial_events().size() == 20);
  for (int i = 0; i < 50; ++i) CHECK(a.next({}) == b.next({}));

  cfg.seed = 43;
  StreamGenerator c(cfg);
  bool differs = false;
  for (int i = 0; i < 50 && !differs; ++i) differs = !(a.next({}) == c.next({}));
  CHECK(differs);
}

TEST_CASE("generator initial insertions are ids 0..n-1 in range") {
  GeneratorConfig cfg;
  cfg.n_init = 10;
  cfg.dim = 2;
  StreamGenerator g(cfg);
  PointId want = 0;
  for (const auto& ev : g.initial_events()) {
    CHECK(ev.kind == UpdateEvent::Kind::kInsert);
    CHECK(ev.id == want++);
    REQUIRE(ev.coords.size() == 2);
    for (double c : ev.coords) {
      CHECK(c >= 0.0);
      CHECK(c < 100.0);
    }
  }
}

TEST_CASE("oblivious delete_fraction endpoints") {
  GeneratorConfig cfg;
  cfg.n_init = 5;
  cfg.dim = 1;
  cfg.delete_fraction = 0.0;
  StreamGenerator grow(cfg);
  for (int i = 0; i < 30; ++i) CHECK(grow.next({}).kind == UpdateEvent::Kind::kInsert);

  cfg.delete_fraction = 1.0;
  StreamGenerator shrink(cfg);
  for (int i = 0; i < 5; ++i) CHECK(shrink.next({}).kind == UpdateEvent::Kind::kDelete);
  // once the live set is drained, deletion requests fall back to insertions
  CHECK(shrink.next({}).kind == UpdateEvent::Kind::kInsert);
}

TEST_CASE("churn pairs every insertion with an immediate deletion") {
  GeneratorConfig cfg;
  cfg.kind = GeneratorKind::kChurn;
  cfg.n_init = 8;
  cfg.dim = 2;
  for (int round = 0; round < 12; ++round) {
    StreamGenerator g(cfg);  // fresh generator per round keeps pairs aligned
    for (int i = 0; i <= round; ++i) {
      UpdateEvent ins = g.next({});
      UpdateEvent del = g.next({});
      CHECK(ins.kind == UpdateEvent::Kind::kInsert);
      CHECK(del.kind == UpdateEvent::Kind::kDelete);
      CHECK(del.id == ins.id);
      CHECK(ins.id == cfg.n_init + std::size_t(i));
    }
  }
}

TEST_CASE("churn insertions land far outside the current live set") {
  GeneratorConfig cfg;
  cfg.kind = GeneratorKind::kChurn;
  cfg.n_init = 6;
  cfg.dim = 2;
  StreamGenerator g(cfg);

  std::vector<std::vector<double>> coords(6);
  for (const auto& ev : g.initial_events()) coords[ev.id] = ev.coords;
  double diam = 0.0;
  auto d2 = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  };
  for (std::size_t a = 0; a < coords.size(); ++a)
    for (std::size_t b = a + 1; b < coords.size(); ++b) diam = std::max(diam, d2(coords[a], coords[b]));

  for (int i = 0; i < 5; ++i) {
    UpdateEvent ins = g.next({});
    for (const auto& c : coords)
      CHECK(d2(ins.coords, c) > diam);  // strictly dominates the old diameter
    (void)g.next({});                   // matching delete restores the base set
  }
}

TEST_CASE("adaptive strategy deletes the freshest solution member") {
  GeneratorConfig cfg;
  cfg.kind = GeneratorKind::kAdaptiveDeleteCenter;
  cfg.n_init = 6;
  cfg.dim = 2;
  cfg.delete_fraction = 1.0;  // delete whenever a live target exists
  StreamGenerator g(cfg);

  auto view = [](std::vector<PointId> ids) {
    return [ids]() { return ids; };
  };

  // 1 is seen before 4 inside the same report, so 4 is the fresher target
  UpdateEvent e1 = g.next(view({1, 4}));
  CHECK(e1 == UpdateEvent{UpdateEvent::Kind::kDelete, 4, {}});
  UpdateEvent e2 = g.next(view({1, 3}));
  CHECK(e2.id == 3);
  UpdateEvent e3 = g.next(view({1}));
  CHECK(e3.id == 1);
  // dead members are skipped even though they were seen most recently
  UpdateEvent e4 = g.next(view({3, 0}));
  CHECK(e4 == UpdateEvent{UpdateEvent::Kind::kDelete, 0, {}});
  // nothing live in the solution: fall back to insertion
  UpdateEvent e5 = g.next(view({1, 3, 4}));
  CHECK(e5.kind == UpdateEvent::Kind::kInsert);
  CHECK(e5.id == 6);
}

TEST_CASE("generator config validation") {
  GeneratorConfig cfg;
  cfg.dim = 0;
  CHECK_THROWS_AS(StreamGenerator{cfg}, ValidationError);
  cfg.dim = 2;
  cfg.delete_fraction = 1.5;
  CHECK_THROWS_AS(StreamGenerator{cfg}, ValidationError);
}

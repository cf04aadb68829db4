#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "emdec/diagnostics.hpp"
#include "emdec/error.hpp"
#include "support.hpp"

using namespace emdec;

TEST_CASE("trace append rules") {
  Trace t({"a", "b"});
  t.append(0.0, {1.0, 2.0});
  t.append(0.5, {3.0, 4.0});
  CHECK(t.size() == 2);
  CHECK(t.column("b") == std::vector<double>{2.0, 4.0});
  CHECK(t.column_index("a") == 0);
  CHECK_THROWS_AS(t.column("c"), Error);
  CHECK_THROWS_AS(t.append(0.5, {1, 1}), Error);
  CHECK_THROWS_AS(t.append(1.0, {1}), Error);
  CHECK_THROWS_AS(t.append(1.0, {1, NAN}), Error);
  CHECK_THROWS_AS(t.append(INFINITY, {1, 1}), Error);
  CHECK(t.size() == 2);
}

TEST_CASE("trace csv") {
  Trace t({"energy", "probe"});
  t.append(0.0, {0.1, -2.0});
  t.append(0.25, {1.0 / 3.0, 5e-300});
  std::ostringstream os;
  t.write_csv(os);
  const std::string s = os.str();
  CHECK(s.find("t,energy,probe\n") == 0);
  CHECK(s.find("\r") == std::string::npos);
  CHECK(s.find("0.33333333333333331") != std::string::npos);
  CHECK(std::count(s.begin(), s.end(), '\n') == 3);
}

TEST_CASE("energy of synchronous and staggered states") {
  const auto mesh = fixtures::rect2(3, 3, 0.5, 0.5);
  const auto mat = MaterialField::uniform(mesh, 2.0, 1.0);
  const auto he = build_hodge(mesh, 1, mat, MaterialTag::Epsilon);
  const auto hm = build_hodge(mesh, 2, mat, MaterialTag::MuInverse);
  FieldState s(mesh);
  const Index e = nearest_interior_edge(mesh, {0.75, 0.75, 0});
  s.E[e] = 3.0;
  s.B[0] = 2.0;
  const double expect = 0.5 * 9.0 * he.entries[e] + 0.5 * 4.0 * hm.entries[0];
  CHECK(energy(s, he, hm) == doctest::Approx(expect));

  // staggered: B+ = B- - dt dE, with E nonzero only on e
  s.t_E = 0.1;
  s.t_B = 0.05;
  Cochain dE = coboundary(s.E);
  double stag = 0.5 * 9.0 * he.entries[e];
  for (Index f = 0; f < mesh.num_faces(); ++f) stag += 0.5 * s.B[f] * hm.entries[f] * (s.B[f] - 0.1 * dE[f]);
  CHECK(energy(s, he, hm) == doctest::Approx(stag));

  s.t_B = 0.2;
  CHECK_THROWS_AS(energy(s, he, hm), Error);
}

TEST_CASE("conservation values and recording") {
  const auto mesh = fixtures::rect3(2, 2, 2, 1, 1, 1);
  const auto mat = MaterialField::uniform(mesh);
  const auto he = build_hodge(mesh, 1, mat, MaterialTag::Epsilon);
  const auto hm = build_hodge(mesh, 2, mat, MaterialTag::MuInverse);
  FieldState s(mesh);
  s.B[0] = 1.0;
  const ZeroSource z(mesh);
  const auto v = conservation_values(s, z, he, hm);
  REQUIRE(v.size() == 3);
  CHECK(v[2] == 1.0);
  Trace t(kConservationColumns);
  record_conservation(t, s, z, he, hm, 0.0);
  CHECK(t.row(0) == v);
}

TEST_CASE("dominant frequency of a pure tone") {
  for (double omega : {0.7, 3.0, 4.4429, 11.3}) {
    std::vector<double> t, y;
    const double dt = 0.01;
    for (int i = 0; i < 20000; ++i) {
      t.push_back(i * dt);
      y.push_back(0.8 * std::cos(omega * i * dt + 0.3) + 0.05 * std::sin(2.7 * omega * i * dt));
    }
    const Tone tone = dominant_frequency(t, y);
    CHECK(tone.omega == doctest::Approx(omega).epsilon(1e-5));
    CHECK(tone.amplitude == doctest::Approx(0.8).epsilon(0.02));
  }
  std::vector<double> few(10, 0.0);
  CHECK_THROWS_AS(dominant_frequency(few, few), Error);
  std::vector<double> t(100), y(100);
  for (int i = 0; i < 100; ++i) t[i] = i * i;
  CHECK_THROWS_AS(dominant_frequency(t, y), Error);
}

TEST_CASE("convergence order and trend") {
  std::vector<std::pair<double, double>> pairs{{0.1, 3e-3}, {0.05, 7.5e-4}, {0.025, 1.875e-4}};
  CHECK(convergence_order(pairs) == doctest::Approx(2.0));
  pairs[1].first = 0.2;
  CHECK_THROWS_AS(convergence_order(pairs), Error);
  CHECK_THROWS_AS(convergence_order(std::vector<std::pair<double, double>>{{1, 1}, {0.5, 1}}), Error);

  std::vector<double> t{0, 1, 2, 3, 4}, y{1, 3, 5, 7, 9};
  CHECK(linear_trend(t, y) == doctest::Approx(2.0));
  CHECK_THROWS_AS(linear_trend(std::vector<double>{1}, std::vector<double>{1}), Error);
}

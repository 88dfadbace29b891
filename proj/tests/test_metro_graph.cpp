#include <random>

#include "doctest.h"
#include "metromap/errors.hpp"
#include "metromap/metro_graph.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace metromap;

TEST_SUITE("geometry") {
  TEST_CASE("wrap and direction angles") {
    CHECK(wrap_angle(-kPi / 2, kTwoPi) == doctest::Approx(1.5 * kPi));
    CHECK(wrap_angle(kTwoPi, kTwoPi) == 0.0);
    CHECK(direction_angle({0, 0}, {0, -1}) == doctest::Approx(1.5 * kPi));
    CHECK(slope_angle({0, 0}, {-1, -1}) == doctest::Approx(kPi / 4));
    CHECK(slope_angle({0, 0}, {-1, 0}) == 0.0);
  }

  TEST_CASE("unit vector zeroes round-off") {
    const Point u = unit_vector(kPi / 2);
    CHECK(u.x == 0.0);
    CHECK(u.y == 1.0);
  }

  TEST_CASE("segment relations") {
    CHECK(intersect_segments({0, 0}, {2, 2}, {0, 2}, {2, 0}).relation == SegmentRelation::kProperCrossing);
    const auto x = intersect_segments({0, 0}, {2, 2}, {0, 2}, {2, 0});
    CHECK(x.point.x == doctest::Approx(1.0));
    CHECK(x.t_first == doctest::Approx(0.5));
    CHECK(intersect_segments({0, 0}, {1, 0}, {1, 0}, {2, 1}).relation == SegmentRelation::kTouching);
    CHECK(intersect_segments({0, 0}, {2, 0}, {1, 0}, {3, 0}).relation == SegmentRelation::kCollinearOverlap);
    CHECK(intersect_segments({0, 0}, {1, 0}, {2, 0}, {3, 0}).relation == SegmentRelation::kDisjoint);
    CHECK(intersect_segments({0, 0}, {1, 0}, {0, 1}, {1, 1}).relation == SegmentRelation::kDisjoint);
  }

  TEST_CASE("random segment pairs agree with the orientation oracle") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int i = 0; i < 2000; ++i) {
      const Point a{U(rng), U(rng)}, b{U(rng), U(rng)}, c{U(rng), U(rng)}, d{U(rng), U(rng)};
      const bool proper = oracle::proper_crossing(a, b, c, d);
      CHECK((intersect_segments(a, b, c, d).relation == SegmentRelation::kProperCrossing) == proper);
    }
  }
}

TEST_SUITE("metro_graph") {
  TEST_CASE("horizontal segment") {
    const MetroGraph g = parse_graph(
        R"({"stations":[{"id":"a","name":"A","x":0,"y":0},{"id":"b","name":"B","x":1,"y":0}],
            "lines":[{"id":"1","color":"red","stations":["a","b"]}]})");
    CHECK(g.vertex_count() == 2);
    REQUIRE(g.edge_count() == 1);
    CHECK(g.edge(0).slope == 0.0);
  }

  TEST_CASE("diagonal slope") {
    const MetroGraph g = parse_graph(
        R"({"stations":[{"id":"a","name":"A","x":0,"y":0},{"id":"b","name":"B","x":1,"y":1}],
            "lines":[{"id":"1","color":"red","stations":["a","b"]}]})");
    CHECK(g.edge(0).slope == doctest::Approx(kPi / 4));
  }

  TEST_CASE("explicit edges must be covered by lines") {
    CHECK_THROWS_AS_CODE(parse_graph(R"({"stations":[{"id":"a","x":0,"y":0},{"id":"b","x":1,"y":0},
        {"id":"c","x":2,"y":0}], "edges":[{"u":"a","v":"b"},{"u":"b","v":"c"}],
        "lines":[{"id":"1","color":"red","stations":["a","b"]}]})"),
                         ErrorCode::kUncoveredEdge);
  }

  TEST_CASE("malformed documents") {
    CHECK_THROWS_AS_CODE(parse_graph("{"), ErrorCode::kSchema);
    CHECK_THROWS_AS_CODE(parse_graph(R"({"lines":[]})"), ErrorCode::kSchema);
    CHECK_THROWS_AS_CODE(parse_graph(R"({"stations":[{"id":"a","x":0,"y":0},{"id":"a","x":1,"y":0}],"lines":[]})"),
                         ErrorCode::kDuplicateVertex);
    CHECK_THROWS_AS_CODE(parse_graph(R"({"stations":[{"id":"a","x":0,"y":0}],
        "lines":[{"id":"1","color":"red","stations":["a","zz"]}]})"),
                         ErrorCode::kUnknownVertex);
    CHECK_THROWS_AS_CODE(parse_graph(R"({"stations":[{"id":"a","x":0,"y":0},{"id":"b","x":0,"y":0}],
        "lines":[{"id":"1","color":"red","stations":["a","b"]}]})"),
                         ErrorCode::kZeroLengthEdge);
    CHECK_THROWS_AS_CODE(parse_graph(R"({"stations":[{"id":"a","x":0,"y":0},{"id":"b","x":1,"y":0}],
        "lines":[{"id":"1","color":"red","stations":["a","b","a"]}]})"),
                         ErrorCode::kInvalidLine);
    CHECK_THROWS_AS_CODE(load_graph("/nonexistent/network.json"), ErrorCode::kIo);
  }

  TEST_CASE("bundled fixture sizes") {
    for (const auto& [name, n, m] : {std::tuple{"montreal", 65, 66}, std::tuple{"vienna", 90, 96},
                                      std::tuple{"washington", 97, 101}, std::tuple{"sydney", 173, 181}}) {
      CAPTURE(name);
      const MetroGraph raw = load_fixture(name);
      CHECK(raw.vertex_count() == static_cast<std::size_t>(n));
      CHECK(raw.edge_count() == static_cast<std::size_t>(m));
      CHECK(oracle::count_crossings(raw) == 0);
      const MetroGraph g = prepare_graph(raw);
      CHECK(g.vertex_count() == static_cast<std::size_t>(n));
      CHECK(g.edge_count() == static_cast<std::size_t>(m));
    }
  }

  TEST_CASE("symmetric X gets one dummy") {
    const MetroGraph g = planarize(parse_graph(
        R"({"stations":[{"id":"a","x":0,"y":0},{"id":"b","x":2,"y":2},{"id":"c","x":0,"y":2},{"id":"d","x":2,"y":0}],
            "lines":[{"id":"1","color":"red","stations":["a","b"]},{"id":"2","color":"blue","stations":["c","d"]}]})"));
    CHECK(g.vertex_count() == 5);
    CHECK(g.edge_count() == 4);
    const Vertex& dummy = g.vertex(4);
    CHECK(dummy.is_dummy);
    CHECK(dummy.pos.x == doctest::Approx(1.0));
    CHECK(dummy.pos.y == doctest::Approx(1.0));
    CHECK(g.degree(4) == 4);
    for (const Line& l : g.lines()) CHECK(l.path.size() == 3);
  }

  TEST_CASE("planar input is returned unchanged") {
    const MetroGraph g = load_fixture("path3");
    const MetroGraph p = planarize(g);
    CHECK(p.vertex_count() == g.vertex_count());
    CHECK(p.edge_count() == g.edge_count());
    for (VertexIndex v = 0; v < g.vertex_count(); ++v) CHECK(p.vertex(v).pos == g.vertex(v).pos);
  }

  TEST_CASE("random 8-edge graphs: each crossing adds one vertex and two edges") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(0, 10);
    int checked = 0;
    for (int trial = 0; trial < 400 && checked < 30; ++trial) {
      std::vector<oracle::DocStation> st;
      std::vector<std::vector<std::string>> lines;
      for (int e = 0; e < 8; ++e) {
        st.push_back({"a" + std::to_string(e), U(rng), U(rng)});
        st.push_back({"b" + std::to_string(e), U(rng), U(rng)});
        lines.push_back({"a" + std::to_string(e), "b" + std::to_string(e)});
      }
      const MetroGraph g = parse_graph(oracle::network_json(st, lines));
      const int crossings = oracle::count_crossings(g);
      MetroGraph p;
      try {
        p = planarize(g);
      } catch (const Error&) {
        continue;  // degenerate configuration
      }
      ++checked;
      CHECK(p.vertex_count() == g.vertex_count() + crossings);
      CHECK(p.edge_count() == g.edge_count() + 2 * crossings);
      CHECK(oracle::count_crossings(p) == 0);
    }
    CHECK(checked >= 20);
  }

  TEST_CASE("three edges through one point are rejected") {
    CHECK_THROWS_AS_CODE(planarize(parse_graph(
        R"({"stations":[{"id":"a","x":-1,"y":0},{"id":"b","x":1,"y":0},{"id":"c","x":0,"y":-1},{"id":"d","x":0,"y":1},
            {"id":"e","x":-1,"y":-1},{"id":"f","x":1,"y":1}],
            "lines":[{"id":"1","color":"r","stations":["a","b"]},{"id":"2","color":"g","stations":["c","d"]},
                     {"id":"3","color":"b","stations":["e","f"]}]})")),
                         ErrorCode::kDegenerateCrossing);
  }

  TEST_CASE("embedding sorts counterclockwise") {
    // Neighbors listed at angles π, 0, π/2.
    const MetroGraph g = compute_embedding(parse_graph(
        R"({"stations":[{"id":"c","x":0,"y":0},{"id":"w","x":-1,"y":0},{"id":"e","x":1,"y":0},{"id":"n","x":0,"y":1}],
            "lines":[{"id":"1","color":"r","stations":["w","c"]},{"id":"2","color":"g","stations":["c","e"]},
                     {"id":"3","color":"b","stations":["c","n"]}]})"));
    const auto& rot = g.rotation(*g.find_vertex("c"));
    REQUIRE(rot.size() == 3);
    CHECK(g.vertex(rot[0]).id == "e");
    CHECK(g.vertex(rot[1]).id == "n");
    CHECK(g.vertex(rot[2]).id == "w");
  }

  TEST_CASE("random stars match an atan2 sort") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> A(0, 2 * kPi);
    for (int t = 0; t < 20; ++t) {
      std::vector<oracle::DocStation> st{{"hub", 0, 0}};
      std::vector<std::vector<std::string>> lines;
      std::vector<std::pair<double, std::string>> expected;
      const int deg = 3 + t % 4;
      for (int i = 0; i < deg; ++i) {
        double a = A(rng);
        const std::string id = "n" + std::to_string(i);
        st.push_back({id, std::cos(a), std::sin(a)});
        lines.push_back({"hub", id});
        expected.emplace_back(std::atan2(std::sin(a), std::cos(a)) < 0 ? std::atan2(std::sin(a), std::cos(a)) + 2 * kPi
                                                                       : std::atan2(std::sin(a), std::cos(a)),
                              id);
      }
      std::sort(expected.begin(), expected.end());
      const MetroGraph g = compute_embedding(parse_graph(oracle::network_json(st, lines)));
      const auto& rot = g.rotation(*g.find_vertex("hub"));
      REQUIRE(rot.size() == expected.size());
      for (std::size_t i = 0; i < rot.size(); ++i) CHECK(g.vertex(rot[i]).id == expected[i].second);
    }
  }

  TEST_CASE("rotating the input preserves cyclic orders") {
    const MetroGraph base = prepare_graph(load_fixture("vienna"));
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> A(0, 2 * kPi);
    for (int t = 0; t < 5; ++t) {
      const double phi = A(rng);
      std::vector<Vertex> vs = base.vertices();
      for (Vertex& v : vs) {
        v.pos = {std::cos(phi) * v.pos.x - std::sin(phi) * v.pos.y,
                 std::sin(phi) * v.pos.x + std::cos(phi) * v.pos.y};
      }
      std::vector<std::pair<VertexIndex, VertexIndex>> pairs;
      for (const Edge& e : base.edges()) pairs.emplace_back(e.u, e.v);
      const MetroGraph rotated = compute_embedding(MetroGraph::build(vs, pairs, base.lines()));
      for (VertexIndex v = 0; v < base.vertex_count(); ++v) {
        const auto& a = base.rotation(v);
        const auto& b = rotated.rotation(v);
        REQUIRE(a.size() == b.size());
        // Same cyclic sequence up to the starting element.
        const auto start = std::find(b.begin(), b.end(), a.front()) - b.begin();
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[(start + i) % b.size()]);
      }
    }
  }

  TEST_CASE("degree bound") {
    std::vector<oracle::DocStation> st{{"hub", 0, 0}};
    std::vector<std::vector<std::string>> lines;
    for (int i = 0; i < 7; ++i) {
      const double a = 2 * kPi * i / 7;
      st.push_back({"n" + std::to_string(i), std::cos(a), std::sin(a)});
      lines.push_back({"hub", "n" + std::to_string(i)});
    }
    const MetroGraph seven = parse_graph(oracle::network_json(st, lines));
    CHECK_THROWS_AS(validate_degree(seven, 3), DegreeExceedsDirections);
    CHECK_NOTHROW(validate_degree(seven, 4));
    CHECK_NOTHROW(validate_degree(load_fixture("star6"), 3));
    const MetroGraph vienna = load_fixture("vienna");
    CHECK(vienna.max_degree() == 4);
    CHECK_NOTHROW(validate_degree(vienna, 3));
  }
}

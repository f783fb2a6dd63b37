#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "secnet/errors.hpp"
#include "secnet/graph.hpp"

using namespace secnet;

TEST_CASE("graph construction normalises and validates edges") {
  Graph g(4, {{2, 1}, {0, 1}, {3, 2}});
  REQUIRE(g.n_edges() == 3);
  CHECK(g.edges()[0] == Edge{0, 1});
  CHECK(g.edges()[1] == Edge{1, 2});
  CHECK(g.edges()[2] == Edge{2, 3});
  CHECK(g.has_edge(1, 2));
  CHECK(g.has_edge(2, 1));
  CHECK_FALSE(g.has_edge(0, 3));
  CHECK(g.degree(1) == 2);
  CHECK(g.max_degree() == 2);
  CHECK(g.is_connected());

  CHECK_THROWS_AS(Graph(3, {{0, 0}}), InvalidArgument);
  CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), InvalidArgument);
  CHECK_THROWS_AS(Graph(3, {{0, 3}}), InvalidArgument);
}

TEST_CASE("components and density") {
  Graph g(5, {{0, 1}, {2, 3}});
  CHECK(g.component_count() == 3);
  CHECK_FALSE(g.is_connected());
  CHECK(g.density() == doctest::Approx(0.2));
  CHECK(complete_graph(6).density() == 1.0);
  CHECK(complete_graph(6).n_edges() == 15);
  CHECK(cycle_graph(7).n_edges() == 7);
  CHECK(path_graph(7).n_edges() == 6);
  CHECK(star_graph(7).max_degree() == 6);
}

TEST_CASE("adjacency matrix and neighbor masks agree with the edge list") {
  const Graph g = cycle_graph(5);
  const auto a = g.adjacency_matrix();
  const auto masks = g.neighbor_masks();
  for (Node i = 0; i < 5; ++i) {
    for (Node j = 0; j < 5; ++j) {
      CHECK(a(i, j) == (g.has_edge(i, j) ? 1.0 : 0.0));
      CHECK(((masks[i] >> j) & 1U) == (g.has_edge(i, j) ? 1U : 0U));
    }
  }
  CHECK(a.isApprox(a.transpose()));
}

TEST_CASE("JSON and edge-list round trips preserve the edge set") {
  const Graph g(6, {{0, 5}, {1, 2}, {2, 5}, {3, 4}});
  const Graph from_json = graph_from_json(to_json(g));
  CHECK(from_json == g);
  CHECK(from_json.fingerprint() == g.fingerprint());
  CHECK(to_json(g) == "{\"n\": 6, \"edges\": [[0, 5], [1, 2], [2, 5], [3, 4]]}\n");

  const Graph from_list = graph_from_edge_list(to_edge_list(g));
  CHECK(from_list == g);

  const Graph inferred = graph_from_edge_list("# comment\n0 1\n1 4\n");
  CHECK(inferred.n() == 5);

  CHECK_THROWS_AS(graph_from_json("{\"n\": 2}"), IoError);
  CHECK_THROWS_AS(graph_from_json("not json"), IoError);
}

TEST_CASE("graph files dispatch on extension") {
  const auto dir = std::filesystem::temp_directory_path() / "secnet_graph_io";
  std::filesystem::create_directories(dir);
  const Graph g = cycle_graph(9);
  write_graph(dir / "g.json", g);
  write_graph(dir / "g.txt", g);
  CHECK(read_graph(dir / "g.json") == g);
  CHECK(read_graph(dir / "g.txt") == g);
  CHECK_THROWS_AS(read_graph(dir / "missing.json"), IoError);
}

TEST_CASE("fingerprint separates different graphs") {
  CHECK(cycle_graph(6).fingerprint() != path_graph(6).fingerprint());
  CHECK(Graph(3, {{0, 1}}).fingerprint() != Graph(4, {{0, 1}}).fingerprint());
}

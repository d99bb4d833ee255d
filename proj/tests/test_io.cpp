#include "oracles.hpp"
#include "tmpdir.hpp"
#include "transop/clustering.hpp"
#include "transop/error.hpp"
#include "transop/io.hpp"
#include "transop/operators.hpp"

#include <doctest.h>

#include <limits>

using namespace transop;

TEST_SUITE("io") {
  TEST_CASE("doubles round-trip exactly") {
    Rng rng(71, stream_tag::property);
    for (int i = 0; i < 1000; ++i) {
      const double v = rng.normal() * std::pow(10.0, rng.uniform(-20, 20));
      CHECK(std::stod(io::format_double(v)) == v);
    }
    CHECK(io::format_double(0.5) == "0.5");
    CHECK(io::format_double(1.0) == "1");
  }

  TEST_CASE("matrix csv") {
    TempDir dir("io");
    Matrix a(2, 3);
    a << 1.0 / 3, -2, 1e-300, 4, 5.5, std::numeric_limits<double>::max();
    io::write_matrix_csv(dir / "a.csv", a);
    CHECK(io::read_matrix_csv(dir / "a.csv") == a);
    io::write_text(dir / "ragged.csv", "1,2\n3\n");
    CHECK_THROWS_AS(io::read_matrix_csv(dir / "ragged.csv"), Error);
    CHECK_THROWS_AS(io::read_matrix_csv(dir / "missing.csv"), Error);
  }

  TEST_CASE("pair dataset") {
    TempDir dir("io");
    PairDataset d;
    d.xs.resize(3, 2);
    d.ys.resize(3, 2);
    d.xs << 0.1, 0.2, 0.3, 0.4, -1, 1;
    d.ys << 0.15, 0.25, 0.35, 0.45, -1.1, 0.9;
    d.lag = 0.1;
    d.seed = 12;
    d.discarded = 4;
    d.mode = SampleMode::bursts;
    io::write_pair_dataset(dir / "pairs.csv", d);
    CHECK(std::filesystem::exists(dir / "pairs.json"));
    const PairDataset e = io::read_pair_dataset(dir / "pairs.csv");
    CHECK(e.xs == d.xs);
    CHECK(e.ys == d.ys);
    CHECK(e.lag == d.lag);
    CHECK(e.seed == d.seed);
    CHECK(e.discarded == d.discarded);
    CHECK(e.mode == d.mode);
  }

  TEST_CASE("bundle") {
    TempDir dir("io");
    OperatorBundle b = operator_bundle(transition_matrix(oracle::barbell(0.3)), Density::uniform(6));
    b.provenance = {Provenance::Kind::exact, "barbell"};
    io::write_bundle(dir / "b", b, {{"note", "x"}});
    const OperatorBundle c = io::read_bundle(dir / "b");
    CHECK(c.K == b.K);
    CHECK(c.T == b.T);
    CHECK(c.F == b.F);
    CHECK(c.B == b.B);
    CHECK(c.P == b.P);
    CHECK(c.mu == b.mu);
    CHECK(c.nu == b.nu);
    CHECK(c.provenance.id == "barbell");
    CHECK(io::read_json(dir / "b" / "manifest.json")["note"] == "x");
  }

  TEST_CASE("partition csv") {
    TempDir dir("io");
    Partition p;
    p.labels = {0, -1, 2, 1};
    p.m = 3;
    io::write_partition_csv(dir / "p.csv", p);
    CHECK(io::read_text(dir / "p.csv").rfind("vertex,label\n", 0) == 0);
    const Partition q = io::read_partition_csv(dir / "p.csv");
    CHECK(q.labels == p.labels);
    CHECK(q.m == 3);
  }

  TEST_CASE("edge lists") {
    const Graph g = io::parse_edge_list("# two triangles\n0 1 1\n1 2 1\n0 2 1\n\n3 4 1 # trailing\n4 5 1\n3 5 1\n", false);
    CHECK(g.size() == 6);
    CHECK(g.dense() == g.dense().transpose());
    CHECK(out_degree(g, 4) == 2.0);
    const Graph h = io::parse_edge_list(io::edge_list_text(g), false);
    CHECK(h.dense() == g.dense());
    const Graph d = io::parse_edge_list("0 1 0.5\n1 0 2\n", true);
    CHECK(d.dense()(1, 0) == 2.0);
    // explicit size keeps trailing isolated vertices
    CHECK(io::parse_edge_list("# n 5\n0 1 1\n", false).size() == 5);
    CHECK(io::parse_edge_list("0 1 1\n", false, 4).size() == 4);
    CHECK_THROWS_AS(io::parse_edge_list("0 1\n", false), Error);
    CHECK_THROWS_AS(io::parse_edge_list("0 -1 1\n", false), Error);
    CHECK_THROWS_AS(io::parse_edge_list("0 1 -2\n", false), Error);
    CHECK_THROWS_AS(io::parse_edge_list("0 1 1\n1 0 1\n", false), Error);
  }

  TEST_CASE("layered edge lists") {
    TempDir dir("io");
    LayeredGraph lg{{oracle::triangle(), Graph::from_edges(3, {{0, 1, 2}, {1, 2, 1}}, false)}, {0.0, 1.0}};
    io::write_layered_edge_list(dir / "l.edges", lg);
    const LayeredGraph back = io::read_layered_edge_list(dir / "l.edges", false);
    REQUIRE(back.layers.size() == 2);
    CHECK(back.layers[0].dense() == lg.layers[0].dense());
    CHECK(back.layers[1].dense() == lg.layers[1].dense());
    const LayeredGraph parsed = io::parse_layered_edge_list("0 0 1 1\n1 1 2 1\n", false, 3);
    CHECK(parsed.layers.size() == 2);
    CHECK(parsed.layers[1].size() == 3);
  }
}

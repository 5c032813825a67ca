#include <catch_amalgamated.hpp>

#include <sstream>

#include "rdo/consensus.hpp"

using Catch::Matchers::WithinAbs;
using rdo::DirectedGraph;
using rdo::ScalarMessage;
using rdo::Vector;

namespace {

std::vector<Vector> scalars(std::initializer_list<double> v) {
  std::vector<Vector> out;
  for (double x : v) out.push_back(Vector::Constant(1, x));
  return out;
}

std::vector<Vector> random_states(std::size_t n, Eigen::Index d, rdo::Seed seed) {
  rdo::Engine eng = rdo::make_engine(seed);
  std::uniform_real_distribution<double> u(-10, 10);
  std::vector<Vector> out(n, Vector(d));
  for (auto& x : out)
    for (Eigen::Index p = 0; p < d; ++p) x(p) = u(eng);
  return out;
}

}  // namespace

TEST_CASE("scalar trimmed step") {
  const std::vector<ScalarMessage> msgs{{0, 0.0}, {1, 1.0}, {2, 3.0}, {3, 10.0}};
  CHECK(rdo::wmsr_scalar_step(2.0, msgs, 1) == 2.0);
  CHECK(rdo::wmsr_scalar_step(2.0, msgs, 0) == (2.0 + 0 + 1 + 3 + 10) / 5.0);

  const std::vector<ScalarMessage> same{{0, 4.0}, {1, 4.0}, {2, 4.0}};
  CHECK(rdo::wmsr_scalar_step(4.0, same, 2) == 4.0);
  CHECK(rdo::wmsr_scalar_step(4.0, {}, 2) == 4.0);

  // only values strictly beyond own are trimmed; equal values always survive
  const std::vector<ScalarMessage> ties{{0, 1.0}, {1, 1.0}, {2, 5.0}};
  CHECK(rdo::wmsr_scalar_step(1.0, ties, 1) == 1.0);
  // fewer than F values above: all of them go
  const std::vector<ScalarMessage> one_high{{0, 9.0}, {1, -1.0}, {2, -3.0}};
  CHECK(rdo::wmsr_scalar_step(0.0, one_high, 2) == 0.0);
}

TEST_CASE("plain averaging converges to the mean on a complete graph") {
  const auto g = DirectedGraph::complete(3);
  const std::vector<bool> byz(3, false);
  const auto res = rdo::compute_auxiliary_point(g, scalars({0, 1, 2}), byz, {}, 0, {}, 1);
  CHECK(res.converged);
  for (const auto& [id, x] : res.per_node_aux) CHECK_THAT(x(0), WithinAbs(1.0, 1e-8));
  CHECK(res.hyperrect_lo(0) == 0.0);
  CHECK(res.hyperrect_hi(0) == 2.0);
}

TEST_CASE("identical regular starts are a fixed point under attack") {
  const auto g = rdo::grow_robust_graph(12, 4, 3);
  std::vector<bool> byz(12, false);
  byz[11] = true;
  std::vector<Vector> init(12, Vector::Constant(2, 3.5));
  init[11] = Vector::Constant(2, -100.0);
  rdo::AdversaryStrategy adv;
  adv.kind = rdo::AdversaryKind::coordinate_spike;
  const auto res = rdo::compute_auxiliary_point(g, init, byz, adv, 1, {}, 9);
  CHECK(res.iterations_used == 0);
  CHECK(res.diameter == 0.0);
  CHECK(res.per_node_aux.count(11) == 0);
  for (const auto& [id, x] : res.per_node_aux) CHECK(x == Vector::Constant(2, 3.5));
}

TEST_CASE("non F-local placement is a configuration error") {
  const auto g = DirectedGraph::complete(5);
  std::vector<bool> byz{true, true, false, false, false};
  CHECK_THROWS_AS(rdo::compute_auxiliary_point(g, scalars({0, 1, 2, 3, 4}), byz, {}, 1, {}, 0), rdo::ConfigError);
  CHECK_NOTHROW(rdo::compute_auxiliary_point(g, scalars({0, 1, 2, 3, 4}), byz, {}, 2, {}, 0));
  CHECK_THROWS_AS(rdo::compute_auxiliary_point(g, scalars({0, 1}), byz, {}, 2, {}, 0), rdo::InvalidArgument);
  rdo::ConsensusParams zero;
  zero.max_iters = 0;
  CHECK_THROWS_AS(rdo::compute_auxiliary_point(g, scalars({0, 1, 2, 3, 4}), byz, {}, 2, zero, 0),
                  rdo::InvalidArgument);
}

TEST_CASE("regular estimates contract monotonically under every strategy") {
  const auto g = rdo::grow_robust_graph(40, 7, 17);
  const auto byz_ids = rdo::place_byzantine(g, 4, 2, 5);
  std::vector<bool> byz(40, false);
  for (auto b : byz_ids) byz[b] = true;
  const auto init = random_states(40, 3, 77);

  for (auto kind : {rdo::AdversaryKind::evasive_uniform, rdo::AdversaryKind::constant_point,
                    rdo::AdversaryKind::large_noise, rdo::AdversaryKind::coordinate_spike}) {
    rdo::AdversaryStrategy adv;
    adv.kind = kind;
    adv.target = {500.0, -500.0, 500.0};
    const auto res = rdo::compute_auxiliary_point(g, init, byz, adv, 2, {200, 1e-10}, 3);
    INFO(rdo::to_string(kind));
    CHECK(res.converged);
    for (std::size_t t = 1; t < res.trace.size(); ++t) {
      const auto& prev = res.trace[t - 1];
      const auto& cur = res.trace[t];
      CHECK((cur.lo.array() >= prev.lo.array()).all());
      CHECK((cur.hi.array() <= prev.hi.array()).all());
      CHECK((cur.hi - cur.lo).norm() <= (prev.hi - prev.lo).norm());
      CHECK(cur.diameter <= prev.diameter);
    }
    for (const auto& [id, x] : res.per_node_aux) {
      CHECK((x.array() >= res.hyperrect_lo.array() - 1e-9).all());
      CHECK((x.array() <= res.hyperrect_hi.array() + 1e-9).all());
    }
  }
}

TEST_CASE("fault-free averaging on a rooted graph drives the diameter to zero") {
  const auto g = rdo::grow_robust_graph(10, 2, 4);
  REQUIRE(rdo::is_rooted(g));
  const std::vector<bool> byz(10, false);
  const auto res = rdo::compute_auxiliary_point(g, random_states(10, 2, 8), byz, {}, 0, {200, 0.0}, 0);
  REQUIRE(res.trace.size() == 201);
  CHECK(res.trace[200].diameter <= 1e-6 * res.trace[0].diameter);
}

TEST_CASE("desk-scale auxiliary consensus") {
  const auto g = rdo::grow_robust_graph(100, 15, 2024);
  const auto byz_ids = rdo::place_byzantine(g, 5, 2, 1);
  std::vector<bool> byz(100, false);
  for (auto b : byz_ids) byz[b] = true;
  rdo::Engine eng = rdo::make_engine(31);
  std::vector<Vector> mins;
  for (int i = 0; i < 100; ++i) mins.push_back(rdo::random_quadratic(3, eng).minimizer());
  const auto res = rdo::compute_auxiliary_point(g, mins, byz, {}, 2, {500, 1e-8}, 6);
  CHECK(res.converged);
  CHECK(res.diameter <= 1e-8);
  CHECK(res.iterations_used <= 500);
  const Vector& xh = res.lead_estimate();
  CHECK((xh.array() >= res.hyperrect_lo.array()).all());
  CHECK((xh.array() <= res.hyperrect_hi.array()).all());
  const auto first_regular = static_cast<rdo::NodeId>(std::find(byz.begin(), byz.end(), false) - byz.begin());
  CHECK(res.per_node_aux.begin()->first == first_regular);
}

TEST_CASE("consensus is replay-identical for a fixed seed") {
  const auto g = rdo::grow_robust_graph(30, 5, 2);
  std::vector<bool> byz(30, false);
  byz[29] = true;
  const auto init = random_states(30, 2, 3);
  const auto a = rdo::compute_auxiliary_point(g, init, byz, {}, 1, {}, 44);
  const auto b = rdo::compute_auxiliary_point(g, init, byz, {}, 1, {}, 44);
  CHECK(a.per_node_aux == b.per_node_aux);
  CHECK(a.iterations_used == b.iterations_used);
}

TEST_CASE("trace CSV layout") {
  const auto g = DirectedGraph::complete(3);
  const auto res = rdo::compute_auxiliary_point(g, random_states(3, 2, 1), std::vector<bool>(3, false), {}, 0, {}, 0);
  std::ostringstream os;
  rdo::write_consensus_trace(os, res.trace);
  std::istringstream is(os.str());
  std::string header, first;
  std::getline(is, header);
  std::getline(is, first);
  CHECK(header == "iteration,diameter,lo_0,hi_0,lo_1,hi_1");
  CHECK(first.rfind("0,", 0) == 0);
  CHECK(std::count(first.begin(), first.end(), ',') == 5);
}

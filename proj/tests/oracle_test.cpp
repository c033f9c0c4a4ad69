#include <gtest/gtest.h>

#include "jrtp/jrtp.hpp"
#include "support.hpp"

using namespace jrtp;

namespace {

// Best objective by trying every assignment of at most |F| route request
// sets, from the brute-force route list.
int brute_force_objective(const Instance& inst, const RoutingGraph& g) {
  std::set<unsigned> masks;
  for (const Shift& s : enumerate_shifts(inst))
    for (const auto& stops : fixtures::brute_force_routes(g, s)) {
      unsigned m = 0;
      for (int v : stops)
        if (g.is_pickup(v)) m |= 1u << (v - 1);
      masks.insert(m);
    }
  const int n = inst.num_requests();
  int best = 0;
  // Any union of at most |F| route sets, counted per fully served rider.
  std::set<unsigned> reach{0};
  for (int k = 0; k < inst.vehicles(); ++k) {
    std::set<unsigned> next = reach;
    for (unsigned r : reach)
      for (unsigned m : masks) next.insert(r | m);
    reach = std::move(next);
  }
  for (unsigned covered : reach) {
    int v = 0;
    for (const Rider& u : inst.riders) {
      bool all = true;
      for (int r : u.request_ids) all = all && (covered & (1u << (r - 1)));
      if (all) v += static_cast<int>(u.request_ids.size());
    }
    best = std::max(best, v);
  }
  EXPECT_LE(best, n);
  return best;
}

}  // namespace

TEST(Oracle, AgreesWithBruteForce) {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 60 && seed < 400; ++seed) {
    Instance inst;
    if (!fixtures::tight_instance(seed, inst)) continue;
    ++checked;
    const RoutingGraph g = build_graph(inst);
    const auto exact = oracle::solve_exact(inst, g, enumerate_shifts(inst));
    EXPECT_EQ(exact.objective, brute_force_objective(inst, g)) << "seed " << seed;
    EXPECT_GE(exact.lp_bound, exact.objective - 1e-9);
    EXPECT_LE(exact.lp_bound, inst.num_requests() + 1e-9);
    EXPECT_TRUE(validate_solution(exact.witness, exact.objective, inst, g).ok()) << "seed " << seed;
  }
  EXPECT_EQ(checked, 60);
}

TEST(Oracle, RefusesLargeInstances) {
  GeneratorConfig gc;
  gc.n_requests = 7;
  const Instance inst = generate_instance(gc);
  const RoutingGraph g = build_graph(inst);
  EXPECT_THROW(oracle::enumerate_routes(g, enumerate_shifts(inst)[0]), oracle::CapExceeded);
  gc.n_requests = 3;
  const Instance small = generate_instance(gc);
  EXPECT_THROW(oracle::solve_exact(small, build_graph(small), enumerate_shifts(small)), oracle::CapExceeded);
  oracle::Limits lim{6, 10};
  EXPECT_NO_THROW(oracle::solve_exact(small, build_graph(small), enumerate_shifts(small), lim));
}

#include <doctest.h>

#include <string>

#include "seudep/cdfg.hpp"
#include "seudep/schedule.hpp"
#include "support/bruteforce_schedule.hpp"
#include "support/random_dag.hpp"

using namespace seudep;

namespace {

const char* kDataDir = SEUDEP_DATA_DIR;

Cdfg chain_of_adds(int n) {
  Cdfg g;
  for (int i = 0; i < n; ++i) g.nodes.push_back({"c" + std::to_string(i + 10), "add"});
  for (int i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
  detail::finalize_adjacency(g);
  return g;
}

Cdfg independent_muls(int n) {
  Cdfg g;
  for (int i = 0; i < n; ++i) g.nodes.push_back({"m" + std::to_string(i + 10), "mul"});
  detail::finalize_adjacency(g);
  return g;
}

}  // namespace

TEST_CASE("cdfg parsing") {
  auto fir = load_cdfg(std::string(kDataDir) + "/fir16.cdfg.json");
  CHECK(fir.nodes.size() == 31);
  int muls = 0, adds = 0;
  for (const auto& n : fir.nodes) (n.op_class == "mul" ? muls : adds)++;
  CHECK(muls == 16);
  CHECK(adds == 15);

  CHECK(parse_cdfg(R"({"nodes":[{"id":"x","op":"add"}],"edges":[]})").nodes.size() == 1);
  CHECK_THROWS_WITH_AS(
      parse_cdfg(R"({"nodes":[{"id":"a","op":"add"},{"id":"b","op":"add"}],
                     "edges":[["a","b"],["b","a"]]})"),
      doctest::Contains("cycle"), error);
  CHECK_THROWS_WITH_AS(parse_cdfg(R"({"nodes":[{"id":"a","op":"add"}],"edges":[["a","zz"]]})"),
                       doctest::Contains("dangling"), error);
  CHECK_THROWS_WITH_AS(
      parse_cdfg(R"({"nodes":[{"id":"a","op":"add"},{"id":"a","op":"mul"}],"edges":[]})"),
      doctest::Contains("duplicate id"), error);
}

TEST_CASE("critical path length") {
  CHECK(critical_path_length(chain_of_adds(3)) == 3);
  CHECK(critical_path_length(independent_muls(16)) == 1);
  CHECK(critical_path_length(Cdfg{}) == 0);
}

TEST_CASE("list_schedule basics") {
  CHECK(list_schedule(chain_of_adds(3), {{"add", 1}}).c_steps == 3);
  CHECK(list_schedule(independent_muls(16), {{"mul", 2}}).c_steps == 8);
  CHECK_THROWS_WITH_AS(list_schedule(chain_of_adds(2), {{"mul", 1}}),
                       doctest::Contains("infeasible allocation"), error);
  CHECK_THROWS_WITH_AS(list_schedule(chain_of_adds(2), {{"add", 0}}),
                       doctest::Contains("infeasible allocation"), error);
}

TEST_CASE("fig1 fixture schedules like the reference dataflow") {
  auto g = load_cdfg(std::string(kDataDir) + "/fig1.cdfg.json");
  CHECK(list_schedule(g, {{"add", 2}, {"mul", 2}}).c_steps == 3);
  CHECK(list_schedule(g, {{"add", 2}, {"mul", 1}}).c_steps == 4);
  CHECK(throughput(3, 1.0) == doctest::Approx(1.0 / 3.0));
  CHECK(throughput(4, 1.0) == doctest::Approx(0.25));
}

TEST_CASE("fir16 at the base allocation matches the exhaustive optimum") {
  auto fir = load_cdfg(std::string(kDataDir) + "/fir16.cdfg.json");
  Allocation base{{"add", 2}, {"mul", 2}};
  Schedule s = list_schedule(fir, base);
  CHECK(schedule_is_valid(fir, base, s));
  CHECK(s.c_steps == testing::optimal_c_steps(fir, base));
}

TEST_CASE("throughput and normalization") {
  CHECK(throughput(1, 100e6) == doctest::Approx(1e8));
  CHECK_THROWS_AS(throughput(0, 1.0), error);
  CHECK(normalized_throughput(3, 3) == 1.0);
  CHECK(normalized_throughput(4, 3) == doctest::Approx(0.75));
  CHECK_THROWS_WITH_AS(normalized_throughput(2, 3), doctest::Contains("inconsistent"), error);

  auto fir = load_cdfg(std::string(kDataDir) + "/fir16.cdfg.json");
  int full = list_schedule(fir, {{"add", 2}, {"mul", 2}}).c_steps;
  int minimal = list_schedule(fir, {{"add", 1}, {"mul", 1}}).c_steps;
  double ratio = normalized_throughput(minimal, full);
  CHECK(ratio > 0.0);
  CHECK(ratio <= 1.0);
}

TEST_CASE("determinism: identical input gives identical assignment") {
  auto fir = load_cdfg(std::string(kDataDir) + "/fir16.cdfg.json");
  Allocation alloc{{"add", 2}, {"mul", 1}};
  Schedule a = list_schedule(fir, alloc);
  Schedule b = list_schedule(fir, alloc);
  CHECK(a.step == b.step);
  CHECK(a.c_steps == b.c_steps);
}

TEST_CASE("schedule validity, bounds, and monotonicity on random DAGs") {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    auto inst = testing::random_dag(seed);
    Schedule s = list_schedule(inst.cdfg, inst.alloc);
    CHECK(schedule_is_valid(inst.cdfg, inst.alloc, s));

    int lb = critical_path_length(inst.cdfg);
    std::map<std::string, int> per_class;
    for (const auto& n : inst.cdfg.nodes) per_class[n.op_class]++;
    for (const auto& [cls, cnt] : per_class)
      lb = std::max(lb, (cnt + inst.alloc.at(cls) - 1) / inst.alloc.at(cls));
    CHECK(s.c_steps >= lb);

    // More units never lengthen the schedule.
    for (const auto& [cls, cnt] : inst.alloc) {
      (void)cnt;
      Allocation bigger = inst.alloc;
      bigger[cls] += 1;
      CHECK(list_schedule(inst.cdfg, bigger).c_steps <= s.c_steps);
    }
  }
}

TEST_CASE("list schedule matches the exhaustive optimum on series-parallel shapes") {
  // chains, forks, and joins where list scheduling is known-tight
  auto fir = load_cdfg(std::string(kDataDir) + "/fir16.cdfg.json");
  for (auto alloc : {Allocation{{"add", 1}, {"mul", 1}}, Allocation{{"add", 1}, {"mul", 2}},
                     Allocation{{"add", 2}, {"mul", 1}}, Allocation{{"add", 2}, {"mul", 2}}}) {
    CHECK(list_schedule(fir, alloc).c_steps == testing::optimal_c_steps(fir, alloc));
  }
  CHECK(list_schedule(chain_of_adds(7), {{"add", 3}}).c_steps == 7);
}

TEST_CASE("list schedule stays within twice the optimum on random DAGs") {
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    auto inst = testing::random_dag(seed);
    int ls = list_schedule(inst.cdfg, inst.alloc).c_steps;
    int opt = testing::optimal_c_steps(inst.cdfg, inst.alloc);
    CHECK(ls <= 2 * opt);
    CHECK(ls >= opt);
  }
}

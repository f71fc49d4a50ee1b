// Acceptance suite on the reference parameter set; one PASS/FAIL line per
// criterion. Optional arguments restrict the run to the listed criteria.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "pulledfront/error.hpp"
#include "pulledfront/verify.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) ids = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  try {
    const auto results = pf::run_acceptance(pf::RunConfig{}, ids, [](const pf::CriterionResult& r) {
      fmt::print("{} C{} {}: {} ({:.1f} s)\n", r.pass ? "PASS" : "FAIL", r.id, r.name, r.summary,
                 r.seconds);
      std::fflush(stdout);
    });
    return pf::all_pass(results) ? 0 : 1;
  } catch (const pf::Error& e) {
    fmt::print("FAIL internal: {}\n", e.what());
    return 1;
  }
}

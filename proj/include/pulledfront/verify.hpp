#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pulledfront/io.hpp"
#include "pulledfront/model.hpp"

namespace pf {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;  // one line
  double seconds = 0.0;
  json data = json::object();
};

// Shared state for the acceptance checks; the reference front and its
// coefficient field are built on first use.
class VerifySession {
 public:
  explicit VerifySession(RunConfig cfg);
  ~VerifySession();

  const RunConfig& config() const { return cfg_; }
  const ModelParameters& params() const;
  const DerivedConstants& constants() const;

  CriterionResult front_correctness();      // 1
  CriterionResult eigen_identities();       // 2
  CriterionResult wronskian_laws();         // 3
  CriterionResult spectral_certificate();   // 4
  CriterionResult theta_kappa();            // 5
  CriterionResult green_function();         // 6
  CriterionResult temporal_kernel();        // 7
  CriterionResult nonlinear_decay();        // 8
  CriterionResult invariant_region();       // 9

  CriterionResult run(int id);

  struct Impl;

 private:
  RunConfig cfg_;
  std::unique_ptr<Impl> impl_;
};

// The additional parameter sets visiting the other behaviours at -infinity.
struct NamedParameters {
  std::string name;
  ModelParameters params;
};
std::vector<NamedParameters> alternate_parameter_sets();

// Runs the criteria in order, calling on_result after each.
std::vector<CriterionResult> run_acceptance(
    const RunConfig& cfg, const std::vector<int>& ids = {1, 2, 3, 4, 5, 6, 7, 8, 9},
    const std::function<void(const CriterionResult&)>& on_result = {});

// {front, spectrum, evans_winding, green_bounds, temporal_slope, nonlinear_slope}
// each "PASS" or "FAIL", plus per-criterion details.
json verdict_json(const std::vector<CriterionResult>& results);
bool all_pass(const std::vector<CriterionResult>& results);

}  // namespace pf

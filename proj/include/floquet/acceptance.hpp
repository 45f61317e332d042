#pragma once

#include <string>
#include <vector>

namespace floquet {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct AcceptanceOptions {
  int grid = 256;
  int threads = 1;
  std::vector<int> only;  // empty: all twelve
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {});
// "criterion  3 PASS  title: detail (0.42 s)"
std::string format_result(const CriterionResult& r);

}  // namespace floquet

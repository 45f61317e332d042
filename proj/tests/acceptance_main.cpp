#include <cstdio>
#include <cstdlib>
#include <string>

#include "floquet/acceptance.hpp"

int main(int argc, char** argv) {
  floquet::AcceptanceOptions opt;
  for (int i = 1; i < argc; ++i) opt.only.push_back(std::atoi(argv[i]));
  bool ok = true;
  for (const auto& r : floquet::run_acceptance(opt)) {
    std::printf("%s\n", floquet::format_result(r).c_str());
    std::fflush(stdout);
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}

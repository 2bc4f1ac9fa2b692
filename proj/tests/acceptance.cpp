// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.
// Usage: acceptance [--seed S] [criterion ids...]
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "kgprop/acceptance.hpp"

int main(int argc, char** argv) {
  unsigned seed = 1;
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--seed" && i + 1 < argc)
      seed = static_cast<unsigned>(std::strtoul(argv[++i], nullptr, 10));
    else
      only.push_back(std::atoi(a.c_str()));
  }
  int failed = 0, total = 0;
  kgprop::run_acceptance(
      seed,
      [&](const kgprop::CriterionResult& r) {
        std::printf("%s\n", kgprop::format_line(r).c_str());
        std::fflush(stdout);
        ++total;
        if (!r.pass) ++failed;
      },
      only);
  std::printf("%d/%d criteria passed\n", total - failed, total);
  return failed == 0 ? 0 : 1;
}

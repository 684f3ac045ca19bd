// One line per acceptance criterion; exit status is the number of failures.

#include <iostream>

#include "chradial/verify.hpp"

int main() {
  const auto results = chradial::run_criteria({}, chradial::VerifyTolerances{}, &std::cout);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed;
}

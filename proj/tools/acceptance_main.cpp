#include <cstdlib>
#include <iostream>
#include <string>

#include "borelsum/acceptance.hpp"

// usage: borelsum_acceptance [--tolerance-scale X] [criterion ...]
int main(int argc, char** argv) {
  borelsum::acceptance::Options opt;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--tolerance-scale" && i + 1 < argc) {
      opt.tolerance_scale = std::atof(argv[++i]);
    } else if (a == "-h" || a == "--help") {
      std::cout << "usage: borelsum_acceptance [--tolerance-scale X] [criterion ...]\n";
      return 0;
    } else {
      const int id = std::atoi(a.c_str());
      if (id < 1 || id > borelsum::acceptance::kCriteria) {
        std::cerr << "unknown criterion '" << a << "'\n";
        return 2;
      }
      opt.only.push_back(id);
    }
  }
  opt.on_result = [](const borelsum::acceptance::CriterionResult& r) {
    std::cout << borelsum::acceptance::format_line(r) << std::endl;
  };
  int failed = 0;
  for (const auto& r : borelsum::acceptance::run(opt)) failed += r.passed ? 0 : 1;
  return failed == 0 ? 0 : 1;
}

// Acceptance suite: runs every verification criterion at full size and prints
// one PASS/FAIL line per criterion. Exit code 0 only when all pass.

#include <cstring>
#include <iostream>

#include "ymflow/verify.hpp"

int main(int argc, char** argv) {
  ymflow::VerifyOptions opts;
  opts.seed = 1;
  opts.threads = 3;
  opts.log = &std::cout;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) opts.quick = true;
    if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc)
      opts.threads = std::atoi(argv[++i]);
  }
  const ymflow::ResultRecord rec = ymflow::run_verify(opts);
  std::cout << (rec.all_pass() ? "ACCEPTANCE: all criteria passed"
                               : "ACCEPTANCE: FAILURES present")
            << "  (wall " << rec.wall_time_s << " s)\n";
  int fails = 0;
  for (const auto& a : rec.assertions) {
    if (!a.pass) {
      std::cout << "  failed: " << a.name << "  measured=" << a.measured
                << "  tol=" << a.tolerance << "\n";
      ++fails;
    }
  }
  return fails == 0 ? 0 : 4;
}

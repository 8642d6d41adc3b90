// Compares the serial reference kernels against the OpenMP-parallel ones:
// propositional truth-table sweeps at growing atom counts and naive
// finite-model enumeration at growing signature sizes.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "symlog/oracle.hpp"

using namespace symlog;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// Chain of implications a0 -> a1 -> ... -> a(n-1) plus a0; goal a(n-1).
// Entailed, so the sweep must visit every valuation.
void pl_case(int atoms, std::vector<FormulaPtr>& premises, FormulaPtr& goal) {
  premises.clear();
  for (int i = 0; i + 1 < atoms; ++i) {
    premises.push_back(mk_implies(mk_atom("a" + std::to_string(i)),
                                  mk_atom("a" + std::to_string(i + 1))));
  }
  premises.push_back(mk_atom("a0"));
  goal = mk_atom("a" + std::to_string(atoms - 1));
}

void fol_case(int preds, std::vector<FormulaPtr>& premises, FormulaPtr& goal) {
  // forall x. (p0(x) -> p1(x)), ..., p0(a); goal p_last(a). Entailed.
  premises.clear();
  for (int i = 0; i + 1 < preds; ++i) {
    std::string p = "p" + std::to_string(i);
    std::string q = "p" + std::to_string(i + 1);
    premises.push_back(parse_formula("forall x. (" + p + "(x) -> " + q + "(x))"));
  }
  premises.push_back(parse_formula("p0(a)"));
  goal = parse_formula("p" + std::to_string(preds - 1) + "(a)");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n\n", omp_get_max_threads());
#else
  std::printf("OpenMP not available; parallel kernels run serially\n\n");
#endif

  OracleLimits limits;
  limits.max_pl_atoms = 26;
  limits.max_search_nodes = 2'000'000'000LL;

  std::printf("%-34s %12s %12s %9s\n", "case", "serial (s)", "parallel (s)", "speedup");

  for (int atoms : {16, 18, 20, 22}) {
    std::vector<FormulaPtr> premises;
    FormulaPtr goal;
    pl_case(atoms, premises, goal);

    auto t0 = clock_type::now();
    EntailmentVerdict serial = pl_entails_serial(premises, goal, limits);
    double ts = seconds_since(t0);

    t0 = clock_type::now();
    EntailmentVerdict parallel = pl_entails(premises, goal, limits);
    double tp = seconds_since(t0);

    if (serial.status != parallel.status) {
      std::printf("MISMATCH at pl/%d atoms\n", atoms);
      return 1;
    }
    std::string name = "pl_entails, " + std::to_string(atoms) + " atoms";
    std::printf("%-34s %12.4f %12.4f %8.2fx\n", name.c_str(), ts, tp, ts / tp);
  }

  std::printf("\n");
  for (int preds : {3, 4, 5}) {
    std::vector<FormulaPtr> premises;
    FormulaPtr goal;
    fol_case(preds, premises, goal);

    auto t0 = clock_type::now();
    EntailmentVerdict serial = fol_entails_naive(premises, goal, 2, /*parallel=*/false, limits);
    double ts = seconds_since(t0);

    t0 = clock_type::now();
    EntailmentVerdict parallel = fol_entails_naive(premises, goal, 2, /*parallel=*/true, limits);
    double tp = seconds_since(t0);

    if (serial.status != parallel.status) {
      std::printf("MISMATCH at fol/%d predicates\n", preds);
      return 1;
    }
    std::string name = "fol_entails_naive, " + std::to_string(preds) + " preds, n<=2";
    std::printf("%-34s %12.4f %12.4f %8.2fx\n", name.c_str(), ts, tp, ts / tp);

    t0 = clock_type::now();
    EntailmentVerdict pruned = fol_entails_finite(premises, goal, 2, limits);
    double td = seconds_since(t0);
    if (pruned.status != serial.status) {
      std::printf("MISMATCH between pruned search and naive enumeration\n");
      return 1;
    }
    std::printf("%-34s %12s %12.4f\n", "  (pruned production search)", "-", td);
  }
  return 0;
}

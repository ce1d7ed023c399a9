#pragma once

#include <string>
#include <vector>

#include "eqop/eval.hpp"

namespace eqop {

struct VerifyOptions {
  int max_order = 60;              // skip checks on groups larger than this
  bool inject_sign_fault = false;  // negate one shift operator (harness self-test)
};

/// Group axioms, operator homomorphisms and character tables, the analytic
/// translation layer, the Fourier conjugation identity, degree bookkeeping
/// and the topology demo.
std::vector<CheckResult> run_theory_checks(const VerifyOptions& options);

/// One line per check: PASS/FAIL, name, deviation and tolerance.
std::string format_checks(const std::vector<CheckResult>& checks);

}  // namespace eqop

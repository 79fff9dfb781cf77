#pragma once

#include <functional>
#include <string>

namespace bf {

struct Classification {
  std::string label;        // pass | noise | candidate-violation | theorem-violation
  bool escalated = false;   // whether the extended-precision re-check ran
  double dd_margin = 0.0;   // only meaningful when escalated
};

/*
 * Shared verdict policy. A nonnegative minimum passes outright. Any
 * negative minimum is re-evaluated at the argmin in double-double
 * (~31 digits): if the re-check clears -1e-24 the negativity was a
 * double-precision artifact and the check passes; a re-check that stays
 * negative but above the tolerance is reported as numerical noise; only
 * a negative margin confirmed below tolerance in both precisions counts
 * as a violation.
 */
inline Classification classify_margin(double margin, double tol, bool theorem,
                                      const std::function<double()>& dd_eval) {
  Classification c;
  if (margin >= 0.0 || margin != margin) {
    // NaN margins are filtered out upstream and counted as anomalies;
    // an all-anomaly scan keeps the +inf sentinel and passes vacuously.
    c.label = "pass";
    return c;
  }
  c.escalated = true;
  c.dd_margin = dd_eval();
  if (c.dd_margin >= -1e-24) {
    c.label = "pass";
  } else if (margin > -tol || c.dd_margin > -tol) {
    c.label = "noise";
  } else {
    c.label = theorem ? "theorem-violation" : "candidate-violation";
  }
  return c;
}

inline int classification_rank(const std::string& label) {
  if (label == "pass") return 0;
  if (label == "noise") return 1;
  if (label == "candidate-violation") return 2;
  return 3;
}

inline int classification_exit_code(const std::string& label) {
  if (label == "candidate-violation") return 2;
  if (label == "theorem-violation") return 3;
  return 0;
}

} // namespace bf

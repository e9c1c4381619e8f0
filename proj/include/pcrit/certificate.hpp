#pragma once

// Certificates are the uniform result type for inequality and property
// checks: a named gap, the worst per-term contribution and where it
// occurred, an equality flag for the sharpness cases, and the tolerances the
// verdict was judged against.

#include <map>
#include <string>
#include <vector>

namespace pcrit {

struct Certificate {
  std::string name;
  double gap = 0.0;           // certified aggregate quantity
  double min_term = 0.0;      // smallest per-term contribution encountered
  std::vector<int> argmin;    // vertex / pair / trial index of min_term
  bool equality_flag = false; // sharpness case detected
  std::map<std::string, double> tolerances;
  std::map<std::string, double> metrics; // named side quantities (sums, counts)
  bool passed = true;
  std::string detail;         // short note (hypothesis failures, context)
};

}  // namespace pcrit

#pragma once

#include <stdexcept>

namespace ivr {

// An engine invariant that must hold broke, or a strict-mode audit tripped.
class ConstructionFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Strict: an audit violation aborts the run. Report: it is recorded and the
// run continues; the final report carries the failures.
enum class AuditMode { Strict, Report };

}  // namespace ivr

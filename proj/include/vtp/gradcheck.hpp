#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vtp/autodiff.hpp"

namespace vtp::ad {

struct NamedParam {
  std::string name;
  Tensor* tensor = nullptr;
};

struct GradCheckEntry {
  std::string param;
  int index = -1;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_err = 0.0;
  bool kink = false;  // the +/- step evaluations crossed a relu/sqrt kink
};

struct GradCheckReport {
  double max_rel_err = 0.0;  // over non-kink entries
  std::string worst_param;
  int worst_index = -1;
  std::size_t checked = 0;
  std::size_t flagged = 0;
  std::vector<GradCheckEntry> entries;

  bool pass(double tolerance) const { return checked > 0 && max_rel_err < tolerance; }
};

// Compares the tape gradient of build_loss against central finite
// differences, entry by entry, with
//   rel_err = |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
// Entries whose perturbed evaluations land on opposite sides of a relu or
// sqrt kink are flagged and excluded from max_rel_err rather than failed.
// Throws NumericalError (naming the parameter) on any non-finite value.
GradCheckReport grad_check(std::span<NamedParam> params,
                           const std::function<Ref(Tape&)>& build_loss, double step,
                           double tolerance);

}  // namespace vtp::ad

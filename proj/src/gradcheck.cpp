#include "vtp/gradcheck.hpp"

#include <cmath>

namespace vtp::ad {

namespace {

double eval_loss(const std::function<Ref(Tape&)>& build_loss, std::vector<std::int8_t>* kinks) {
  Tape tape;
  const Ref loss = build_loss(tape);
  if (kinks) *kinks = tape.kink_signature();
  return tape.value(loss);
}

}  // namespace

GradCheckReport grad_check(std::span<NamedParam> params,
                           const std::function<Ref(Tape&)>& build_loss, double step,
                           double tolerance) {
  if (step <= 0.0) throw NumericalError("grad_check: step must be positive");

  // analytic pass
  for (NamedParam& p : params) p.tensor->zero_grad();
  std::vector<std::vector<double>> analytic;
  {
    Tape tape;
    const Ref loss = build_loss(tape);
    if (!std::isfinite(tape.value(loss))) throw NumericalError("grad_check: loss is non-finite");
    tape.backward(loss);
    for (NamedParam& p : params) {
      if (!p.tensor->finite()) throw NumericalError("grad_check: non-finite value in " + p.name);
      analytic.push_back(p.tensor->g);
      for (double g : p.tensor->g) {
        if (!std::isfinite(g)) throw NumericalError("grad_check: non-finite gradient in " + p.name);
      }
    }
  }

  GradCheckReport report;
  std::vector<std::int8_t> sig_plus, sig_minus;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& t = *params[pi].tensor;
    for (std::size_t i = 0; i < t.v.size(); ++i) {
      const double saved = t.v[i];

      t.v[i] = saved + step;
      const double f_plus = eval_loss(build_loss, &sig_plus);
      t.v[i] = saved - step;
      const double f_minus = eval_loss(build_loss, &sig_minus);
      t.v[i] = saved;

      if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
        throw NumericalError("grad_check: non-finite perturbed loss at " + params[pi].name + "[" +
                             std::to_string(i) + "]");
      }

      GradCheckEntry e;
      e.param = params[pi].name;
      e.index = static_cast<int>(i);
      e.analytic = analytic[pi][i];
      e.numeric = (f_plus - f_minus) / (2.0 * step);
      e.rel_err = std::abs(e.analytic - e.numeric) /
                  std::max({std::abs(e.analytic), std::abs(e.numeric), 1e-8});
      e.kink = sig_plus != sig_minus;

      if (e.kink) {
        ++report.flagged;
      } else {
        ++report.checked;
        if (e.rel_err > report.max_rel_err) {
          report.max_rel_err = e.rel_err;
          report.worst_param = e.param;
          report.worst_index = e.index;
        }
      }
      report.entries.push_back(std::move(e));
    }
  }
  (void)tolerance;
  return report;
}

}  // namespace vtp::ad

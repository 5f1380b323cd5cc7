#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ovtrack/contrastive.hpp"

namespace ovtrack {

/// Central finite differences of `f` at `point` compared coordinate-wise
/// against `analytic_grad`. The relative error denominator is
/// max(1, |analytic|); returns the maximum over coordinates.
double finite_diff_check(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> point, std::span<const double> analytic_grad,
    double step);

/// Flattens an instance into one parameter vector, runs finite_diff_check
/// against grad_loss_track, and returns the max relative error.
double check_loss_track_gradients(const ContrastiveInstance& inst,
                                  double step);

/// Same for the auxiliary pair loss against grad_loss_aux.
double check_loss_aux_gradients(const AuxPair& pair, double step);

}  // namespace ovtrack

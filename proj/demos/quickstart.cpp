// Simulate a BW oscillator under its optimal loading history, then recover
// its parameters with the genetic algorithm and compare hysteresis areas.
#include <cstdio>

#include "bwlab/bwlab.hpp"

int main() {
  using namespace bwlab;
  BwParams truth = apply_mask(midpoint_params(Variant::BW), Variant::BW);
  truth.T = 0.45;
  truth.Fy = 0.3;
  truth.alpha = 0.06;
  truth.beta = 0.55;
  truth.n = 2.0;
  std::printf("u_y = %.4f m\n", truth.uy());

  const LoadingHistory h = optimal_history(Variant::BW, truth.uy());
  const HysteresisCurve measured = simulate_quasi_static(truth, discretize(h));
  std::printf("%s: %zu load steps\n", h.label.c_str(), measured.size());

  GaConfig ga;
  ga.generations = 30;
  ga.population = 60;
  ga.seed = 1;
  const FitResult fit = ga_estimate(measured, Variant::BW, ga);
  std::printf("estimate: T %.3f  Fy %.3f  alpha %.3f  beta %.3f  n %.3f  (mse %.3g)\n", fit.params.T, fit.params.Fy,
              fit.params.alpha, fit.params.beta, fit.params.n, fit.best_fitness);

  const LoadingHistory val = envelope_history(4.0, 8, truth.uy());
  const double ta = validation_area(truth, truth, val), pa = validation_area(truth, fit.params, val);
  std::printf("validation area: true %.4f, estimated %.4f\n", ta, pa);
  return 0;
}

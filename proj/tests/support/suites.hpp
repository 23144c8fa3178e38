#pragma once

#include <string>

// Randomized sweeps shared by the unit tests and the acceptance runner.
namespace suites {

struct Result {
  bool pass = false;
  std::string detail;
};

// Every differentiable op and loss against central differences in double.
Result gradients(int instances = 20);

// Losses and metrics against the 64-bit oracles.
Result loss_and_metric_oracles(int instances = 100);

// Deconvolution round trip, Otsu against the exhaustive scan, separable
// Gaussian against the dense 2-D filter.
Result stain_pipeline(int instances = 1000);

// Mean IoU of membrane_mask against the generator's analytic ring mask.
Result ring_agreement(int samples = 100, double min_iou = 0.7);

}  // namespace suites

#pragma once

namespace dlasso {

// Standard normal CDF via erfc; absolute error well below 1e-10.
double normal_cdf(double x);

// Standard normal density.
double normal_pdf(double x);

// Inverse CDF: rational initial guess (Acklam) polished by one Newton step
// against normal_cdf. p must lie in (0,1).
double normal_quantile(double p);

}  // namespace dlasso

#pragma once

namespace calib::num {

// Standard normal cumulative distribution function.
double std_normal_cdf(double x);

// Standard normal quantile (inverse cdf) for p in (0,1). Implemented as a
// high-accuracy rational approximation polished with one Newton step against
// the cdf; quantile and cdf are mutually inverse to 1e-9 absolute on
// [1e-6, 1-1e-6]. Throws InvalidLevel for p outside (0,1).
double std_normal_quantile(double p);

// Standard normal density, used by the quantile polish step.
double std_normal_pdf(double x);

}  // namespace calib::num

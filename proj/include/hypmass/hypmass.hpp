#pragma once

// Convenience umbrella: pulls in the whole library.
//
//   periodic    uniform periodic grids and spectral calculus
//   geometry    metrics, curvature, and curve functionals
//   spaces      the reference space, the one-parameter metric family,
//               and asymptotic-tail model metrics
//   flow        the radial extension solver with its envelope bounds
//   mass        cross-section mass, its derivative, boundary mass, and
//               the total-curvature comparison
//   ellipse     ellipse boundary masses in the metric family and their
//               large-scale limits
//   verify      the built-in invariant suite
//   csv         strict, byte-stable CSV input/output
//   threads     worker pool sized by HYPMASS_THREADS

#include "btz_ellipse.hpp"
#include "csv.hpp"
#include "errors.hpp"
#include "fft.hpp"
#include "flow.hpp"
#include "geometry.hpp"
#include "interp.hpp"
#include "mass.hpp"
#include "periodic.hpp"
#include "spaces.hpp"
#include "threads.hpp"
#include "verify.hpp"

#pragma once
// Umbrella header for the ginilab library.

#include "ginilab/params.hpp"
#include "ginilab/cubic.hpp"
#include "ginilab/mde.hpp"
#include "ginilab/quadrature.hpp"
#include "ginilab/threads.hpp"
#include "ginilab/complex_onepoint.hpp"
#include "ginilab/real_onepoint.hpp"
#include "ginilab/montecarlo.hpp"
#include "ginilab/bessel.hpp"

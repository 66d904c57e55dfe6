#pragma once

// Umbrella header: sketched-preconditioned sparse least squares toolkit.

#include "cslsq/config.hpp"
#include "cslsq/count_sketch.hpp"
#include "cslsq/csr.hpp"
#include "cslsq/dense.hpp"
#include "cslsq/matrix_market.hpp"
#include "cslsq/precond.hpp"
#include "cslsq/report.hpp"
#include "cslsq/rfm.hpp"
#include "cslsq/rng.hpp"
#include "cslsq/solvers.hpp"
#include "cslsq/vector.hpp"

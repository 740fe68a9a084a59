#pragma once

#include "decay.hpp"
#include "dyadic.hpp"
#include "experiment.hpp"
#include "exponents.hpp"
#include "lp.hpp"
#include "newton.hpp"
#include "nondeg.hpp"
#include "parallel.hpp"
#include "phase.hpp"
#include "quadrature.hpp"
#include "rate_fit.hpp"
#include "rational.hpp"
#include "report.hpp"
#include "sublevel.hpp"

#pragma once

#include "stabidx/polynomial.hpp"
#include "stabidx/polyroot.hpp"
#include "stabidx/random.hpp"
#include "stabidx/models.hpp"
#include "stabidx/probability.hpp"
#include "stabidx/constraints.hpp"
#include "stabidx/refine.hpp"
#include "stabidx/montecarlo.hpp"
#include "stabidx/serialization.hpp"
#include "stabidx/verify.hpp"
#include "stabidx/report.hpp"

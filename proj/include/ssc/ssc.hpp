#pragma once

// Umbrella header.

#include "ssc/bench.hpp"
#include "ssc/certificates.hpp"
#include "ssc/core.hpp"
#include "ssc/geometry.hpp"
#include "ssc/inradius.hpp"
#include "ssc/lasso.hpp"
#include "ssc/parallel.hpp"
#include "ssc/pipeline.hpp"
#include "ssc/random_model.hpp"
#include "ssc/subspace_data.hpp"

#pragma once

// Umbrella header.

#include "kurihara/arith.hpp"
#include "kurihara/bipartite.hpp"
#include "kurihara/curves.hpp"
#include "kurihara/errors.hpp"
#include "kurihara/gross_points.hpp"
#include "kurihara/modsym.hpp"
#include "kurihara/numbers.hpp"
#include "kurihara/oracle.hpp"
#include "kurihara/pipeline.hpp"
#include "kurihara/selmer_predict.hpp"
#include "kurihara/sieves.hpp"

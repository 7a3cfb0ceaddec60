#pragma once

// Everything except io.hpp, which additionally needs nlohmann/json.

#include "osa/bench.hpp"
#include "osa/lp_model.hpp"
#include "osa/planner.hpp"
#include "osa/random.hpp"
#include "osa/sequence.hpp"
#include "osa/shelf.hpp"
#include "osa/solvers.hpp"
#include "osa/surrogate.hpp"
#include "osa/theorems.hpp"

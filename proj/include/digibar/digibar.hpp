#pragma once

#include "digibar/analytic.hpp"
#include "digibar/bil.hpp"
#include "digibar/convergence.hpp"
#include "digibar/crr.hpp"
#include "digibar/expansion.hpp"
#include "digibar/normal.hpp"
#include "digibar/oracles.hpp"
#include "digibar/types.hpp"

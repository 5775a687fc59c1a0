#pragma once

#include "ccg/common.hpp"
#include "ccg/game.hpp"
#include "ccg/instances.hpp"
#include "ccg/io.hpp"
#include "ccg/learning.hpp"
#include "ccg/lp.hpp"
#include "ccg/numeric.hpp"
#include "ccg/oracle.hpp"
#include "ccg/polytope.hpp"
#include "ccg/solver.hpp"
#include "ccg/verifier.hpp"

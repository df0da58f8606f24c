#pragma once

// Umbrella header for the markcalc workbench.

#include "markcalc/action.hpp"
#include "markcalc/bisim.hpp"
#include "markcalc/encode.hpp"
#include "markcalc/mlts.hpp"
#include "markcalc/parser.hpp"
#include "markcalc/rate.hpp"
#include "markcalc/semantics_it.hpp"
#include "markcalc/semantics_ot.hpp"
#include "markcalc/term.hpp"
#include "markcalc/wellformed.hpp"

#pragma once

#include "flycat/errors.hpp"
#include "flycat/feasibility.hpp"
#include "flycat/field.hpp"
#include "flycat/montecarlo.hpp"
#include "flycat/netstates.hpp"
#include "flycat/paritycheck.hpp"
#include "flycat/qcore.hpp"
#include "flycat/rng.hpp"
#include "flycat/scenario.hpp"
#include "flycat/teleport.hpp"

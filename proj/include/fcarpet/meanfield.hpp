#pragma once

#include "fcarpet/meanfield/checkpoint.hpp"
#include "fcarpet/meanfield/propagator.hpp"
#include "fcarpet/meanfield/run.hpp"
#include "fcarpet/meanfield/state.hpp"

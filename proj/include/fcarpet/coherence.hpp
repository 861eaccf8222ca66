#pragma once

#include "fcarpet/coherence/fits.hpp"
#include "fcarpet/coherence/g1.hpp"
#include "fcarpet/coherence/trace.hpp"

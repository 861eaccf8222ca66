#pragma once

#include "fcarpet/core/errors.hpp"
#include "fcarpet/core/grid.hpp"
#include "fcarpet/core/matrix.hpp"
#include "fcarpet/core/occupancy.hpp"
#include "fcarpet/core/trap.hpp"
#include "fcarpet/core/units.hpp"
#include "fcarpet/core/sine_transform.hpp"

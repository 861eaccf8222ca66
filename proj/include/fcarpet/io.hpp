#pragma once

#include "fcarpet/io/binary.hpp"
#include "fcarpet/io/carpet_io.hpp"
#include "fcarpet/io/csv.hpp"
#include "fcarpet/io/heatmap.hpp"
#include "fcarpet/io/matrix_io.hpp"

#pragma once

#include "fcarpet/idealgas/depth.hpp"
#include "fcarpet/idealgas/evolution.hpp"
#include "fcarpet/idealgas/harmonic.hpp"
#include "fcarpet/idealgas/overlaps.hpp"
#include "fcarpet/idealgas/spectral_state.hpp"
#include "fcarpet/idealgas/thomas_fermi.hpp"

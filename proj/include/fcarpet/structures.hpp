#pragma once

#include "fcarpet/structures/track.hpp"
#include "fcarpet/structures/width.hpp"

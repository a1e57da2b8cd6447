#pragma once

#include "polyberg/errors.hpp"
#include "polyberg/frames.hpp"
#include "polyberg/halfplane.hpp"
#include "polyberg/laguerre.hpp"
#include "polyberg/multiplex.hpp"
#include "polyberg/polyspace.hpp"
#include "polyberg/transforms.hpp"
#include "polyberg/verify.hpp"

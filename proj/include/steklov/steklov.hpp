#pragma once

#include "steklov/analysis.hpp"
#include "steklov/bounds.hpp"
#include "steklov/eigenfunction.hpp"
#include "steklov/errors.hpp"
#include "steklov/geometry.hpp"
#include "steklov/quadrature.hpp"
#include "steklov/spectral.hpp"
#include "steklov/sweep.hpp"
#include "steklov/verify.hpp"

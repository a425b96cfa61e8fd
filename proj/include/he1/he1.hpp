/// Everything at once.
#pragma once

#include "core.hpp"
#include "curve.hpp"
#include "forms.hpp"
#include "io.hpp"
#include "polynomial.hpp"
#include "quadrature.hpp"
#include "reference.hpp"
#include "solver.hpp"
#include "surface.hpp"
#include "verify.hpp"
#include "weierstrass.hpp"

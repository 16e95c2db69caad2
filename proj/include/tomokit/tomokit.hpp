#pragma once

#include "tomokit/errors.hpp"
#include "tomokit/special_functions.hpp"
#include "tomokit/grid.hpp"
#include "tomokit/quadrature.hpp"
#include "tomokit/state_catalog.hpp"
#include "tomokit/tomogram.hpp"
#include "tomokit/pdf.hpp"
#include "tomokit/charfun.hpp"
#include "tomokit/validator.hpp"
#include "tomokit/reconstruction.hpp"
#include "tomokit/estimation.hpp"
#include "tomokit/figures.hpp"

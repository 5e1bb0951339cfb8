#pragma once

#include "shiftinv/classify.hpp"
#include "shiftinv/error.hpp"
#include "shiftinv/generator.hpp"
#include "shiftinv/io.hpp"
#include "shiftinv/lattice.hpp"
#include "shiftinv/oracle.hpp"
#include "shiftinv/periodization.hpp"
#include "shiftinv/quadrature.hpp"

#pragma once

#include "adquad/adaptive.hpp"
#include "adquad/cell.hpp"
#include "adquad/errors.hpp"
#include "adquad/gauss.hpp"
#include "adquad/integrands.hpp"
#include "adquad/io.hpp"
#include "adquad/studies.hpp"

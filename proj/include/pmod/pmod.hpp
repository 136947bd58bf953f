#pragma once

#include "pmod/error.hpp"
#include "pmod/matrix.hpp"
#include "pmod/linalg.hpp"
#include "pmod/rng.hpp"
#include "pmod/module.hpp"
#include "pmod/families.hpp"
#include "pmod/structure.hpp"
#include "pmod/io.hpp"
#include "pmod/cli.hpp"

#pragma once

#include "sparsereg/error.hpp"
#include "sparsereg/core.hpp"
#include "sparsereg/random.hpp"
#include "sparsereg/lasso.hpp"
#include "sparsereg/two_stage.hpp"
#include "sparsereg/diagnostics.hpp"
#include "sparsereg/bounds.hpp"
#include "sparsereg/greedy.hpp"
#include "sparsereg/io.hpp"
#include "sparsereg/experiments.hpp"

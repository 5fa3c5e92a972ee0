#pragma once

#include "pdelearn/bicubic.hpp"
#include "pdelearn/dataset.hpp"
#include "pdelearn/dataset_io.hpp"
#include "pdelearn/derivative_bundle.hpp"
#include "pdelearn/equation_io.hpp"
#include "pdelearn/errors.hpp"
#include "pdelearn/finite_difference.hpp"
#include "pdelearn/grid.hpp"
#include "pdelearn/inverse_problem.hpp"
#include "pdelearn/metrics.hpp"
#include "pdelearn/models.hpp"
#include "pdelearn/nelder_mead.hpp"
#include "pdelearn/rng.hpp"
#include "pdelearn/sparse_regression.hpp"
#include "pdelearn/surrogate.hpp"
#include "pdelearn/surrogate_io.hpp"
#include "pdelearn/term_library.hpp"
#include "pdelearn/truth.hpp"

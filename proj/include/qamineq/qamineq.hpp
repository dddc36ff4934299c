#pragma once

// Generalized quasi-arithmetic means over strictly increasing (possibly
// discontinuous) generators, and decision procedures for Hölder-, Minkowski-
// and Jensen-type functional inequalities between them: counterexample
// search, LP-based supporting-hyperplane certificates with Farkas dual
// extraction, and concavity testing of the transfer function.

#include "qamineq/analyze.hpp"
#include "qamineq/certify.hpp"
#include "qamineq/coupler.hpp"
#include "qamineq/errors.hpp"
#include "qamineq/generator.hpp"
#include "qamineq/interval.hpp"
#include "qamineq/means.hpp"
#include "qamineq/primitive.hpp"
#include "qamineq/problem.hpp"
#include "qamineq/simplex.hpp"

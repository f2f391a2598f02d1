#pragma once

#include "aperiodix/error.hpp"
#include "aperiodix/matrix.hpp"
#include "aperiodix/smith.hpp"
#include "aperiodix/polynomial.hpp"
#include "aperiodix/substitution.hpp"
#include "aperiodix/geometry.hpp"
#include "aperiodix/cut_project.hpp"
#include "aperiodix/parallel.hpp"
#include "aperiodix/diffraction.hpp"
#include "aperiodix/spectral.hpp"
#include "aperiodix/label_group.hpp"
#include "aperiodix/quadratic.hpp"
#include "aperiodix/cohomology.hpp"
#include "aperiodix/families.hpp"
#include "aperiodix/bloch.hpp"
#include "aperiodix/io.hpp"

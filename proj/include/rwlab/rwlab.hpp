#pragma once

#include "rwlab/error.hpp"
#include "rwlab/experiment.hpp"
#include "rwlab/isoperimetry.hpp"
#include "rwlab/linalg.hpp"
#include "rwlab/percolation.hpp"
#include "rwlab/point_set.hpp"
#include "rwlab/pointprocess.hpp"
#include "rwlab/profiles.hpp"
#include "rwlab/rng.hpp"
#include "rwlab/spectral.hpp"
#include "rwlab/walk.hpp"

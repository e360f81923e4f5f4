#pragma once

#include "confset/calibration.hpp"
#include "confset/dataset.hpp"
#include "confset/erm.hpp"
#include "confset/error.hpp"
#include "confset/gaussian_mixture.hpp"
#include "confset/learners.hpp"
#include "confset/loss.hpp"
#include "confset/pipeline.hpp"
#include "confset/rng.hpp"
#include "confset/score_model.hpp"
#include "confset/serialization.hpp"
#include "confset/superlearner.hpp"

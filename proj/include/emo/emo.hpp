#pragma once

#include "emo/assignment.hpp"
#include "emo/core.hpp"
#include "emo/cost_model.hpp"
#include "emo/image.hpp"
#include "emo/image_codec.hpp"
#include "emo/kalman.hpp"
#include "emo/metrics.hpp"
#include "emo/scheduler.hpp"
#include "emo/sequence_io.hpp"
#include "emo/similarity.hpp"
#include "emo/tracker.hpp"

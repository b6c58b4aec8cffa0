#pragma once

#include "hrvkit/compare.hpp"
#include "hrvkit/detect.hpp"
#include "hrvkit/error.hpp"
#include "hrvkit/fft.hpp"
#include "hrvkit/filter.hpp"
#include "hrvkit/hrv.hpp"
#include "hrvkit/intervals.hpp"
#include "hrvkit/preprocess.hpp"
#include "hrvkit/signal.hpp"
#include "hrvkit/spline.hpp"
#include "hrvkit/synth.hpp"

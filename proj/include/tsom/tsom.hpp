#pragma once

// Umbrella header for the TSOM small-target motion detection library.

#include "tsom/circuit.hpp"
#include "tsom/common.hpp"
#include "tsom/config.hpp"
#include "tsom/convolve.hpp"
#include "tsom/dendrite.hpp"
#include "tsom/eval.hpp"
#include "tsom/frame.hpp"
#include "tsom/image_io.hpp"
#include "tsom/pipeline.hpp"
#include "tsom/retina.hpp"
#include "tsom/rt.hpp"
#include "tsom/soma.hpp"
#include "tsom/synth.hpp"
#include "tsom/threading.hpp"

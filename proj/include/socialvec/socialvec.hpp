#pragma once

// Joint social representation learning: user/word/entity vectors and
// relation matrices trained by negative-sampling SGD over text, friendship
// and attribute evidence, with attribute / relation / group-behavior
// inference on top.

#include "socialvec/classifier_io.hpp"
#include "socialvec/corpus.hpp"
#include "socialvec/error.hpp"
#include "socialvec/harness.hpp"
#include "socialvec/inference.hpp"
#include "socialvec/math.hpp"
#include "socialvec/objectives.hpp"
#include "socialvec/params.hpp"
#include "socialvec/rng.hpp"
#include "socialvec/synth.hpp"
#include "socialvec/trainer.hpp"

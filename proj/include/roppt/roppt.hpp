#pragma once

// Target-oriented dependency-tree pruning for metaphor detection: corpus
// handling, tree re-rooting and distance pruning, rival denoising strategies,
// a small trainable MIP/SPV classifier and the evaluation apparatus.

#include "roppt/corpus.hpp"
#include "roppt/denoise.hpp"
#include "roppt/encoder.hpp"
#include "roppt/error.hpp"
#include "roppt/io.hpp"
#include "roppt/matrix.hpp"
#include "roppt/metrics.hpp"
#include "roppt/model.hpp"
#include "roppt/params.hpp"
#include "roppt/rng.hpp"
#include "roppt/synthetic.hpp"
#include "roppt/tree.hpp"

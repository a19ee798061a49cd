#pragma once

#include "pubfin/analysis.hpp"
#include "pubfin/config.hpp"
#include "pubfin/error.hpp"
#include "pubfin/ingest.hpp"
#include "pubfin/neural/backprop.hpp"
#include "pubfin/neural/checkpoint.hpp"
#include "pubfin/neural/lstm.hpp"
#include "pubfin/neural/optim.hpp"
#include "pubfin/neural/params.hpp"
#include "pubfin/neural/train.hpp"
#include "pubfin/pipeline.hpp"
#include "pubfin/preprocess.hpp"
#include "pubfin/prng.hpp"
#include "pubfin/ratings.hpp"
#include "pubfin/synth.hpp"

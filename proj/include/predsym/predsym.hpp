#pragma once

#include "predsym/config.hpp"
#include "predsym/conllu.hpp"
#include "predsym/corpus.hpp"
#include "predsym/diag.hpp"
#include "predsym/embeddings.hpp"
#include "predsym/eval.hpp"
#include "predsym/features.hpp"
#include "predsym/gradcheck.hpp"
#include "predsym/hybrid.hpp"
#include "predsym/metrics.hpp"
#include "predsym/optim.hpp"
#include "predsym/persist.hpp"
#include "predsym/pipeline.hpp"
#include "predsym/ridge.hpp"
#include "predsym/rng.hpp"
#include "predsym/text.hpp"

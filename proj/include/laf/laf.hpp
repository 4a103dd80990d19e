#pragma once

#include "laf/counts.hpp"
#include "laf/engine.hpp"
#include "laf/file_io.hpp"
#include "laf/mask.hpp"
#include "laf/mask_io.hpp"
#include "laf/mpe.hpp"
#include "laf/proof/checker.hpp"
#include "laf/proof/formula.hpp"
#include "laf/proof/script.hpp"
#include "laf/synth/generate.hpp"
#include "laf/synth/morphology.hpp"
#include "laf/synth/rng.hpp"
#include "laf/synth/sweep.hpp"
#include "laf/synth/tables.hpp"

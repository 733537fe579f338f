// bwlab: Bouc-Wen class hysteresis toolkit (umbrella header)
#pragma once

#include "bwlab/config.hpp"
#include "bwlab/dataset.hpp"
#include "bwlab/dynamics.hpp"
#include "bwlab/errors.hpp"
#include "bwlab/estimation.hpp"
#include "bwlab/fragility.hpp"
#include "bwlab/io.hpp"
#include "bwlab/loading.hpp"
#include "bwlab/model.hpp"
#include "bwlab/nn.hpp"
#include "bwlab/parallel.hpp"
#include "bwlab/params.hpp"
#include "bwlab/protocol.hpp"
#include "bwlab/random.hpp"
#include "bwlab/sampling.hpp"
#include "bwlab/svg.hpp"

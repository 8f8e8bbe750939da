#pragma once

#include "sketchnet/dataset.hpp"
#include "sketchnet/errors.hpp"
#include "sketchnet/evaluation.hpp"
#include "sketchnet/image_io.hpp"
#include "sketchnet/loss.hpp"
#include "sketchnet/model_io.hpp"
#include "sketchnet/network.hpp"
#include "sketchnet/ops.hpp"
#include "sketchnet/preprocess.hpp"
#include "sketchnet/spec_file.hpp"
#include "sketchnet/tensor.hpp"
#include "sketchnet/training.hpp"

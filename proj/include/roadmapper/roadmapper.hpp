#pragma once

#include "configuration.hpp"
#include "dot.hpp"
#include "error.hpp"
#include "inference.hpp"
#include "model.hpp"
#include "operationalization.hpp"
#include "parser.hpp"
#include "quant_eval.hpp"
#include "roadmap.hpp"
#include "transforms.hpp"

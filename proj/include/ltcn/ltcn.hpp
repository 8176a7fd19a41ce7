#pragma once

#include "bounds.hpp"
#include "complexity.hpp"
#include "errors.hpp"
#include "hosvd.hpp"
#include "network.hpp"
#include "rng.hpp"
#include "sequence.hpp"
#include "svd.hpp"
#include "targets.hpp"
#include "tensor.hpp"

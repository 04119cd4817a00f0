#pragma once

#include "hyperseq/dsl.hpp"
#include "hyperseq/error.hpp"
#include "hyperseq/index_set.hpp"
#include "hyperseq/interval.hpp"
#include "hyperseq/monotone.hpp"
#include "hyperseq/oracle.hpp"
#include "hyperseq/poly.hpp"
#include "hyperseq/rational.hpp"
#include "hyperseq/saturation.hpp"
#include "hyperseq/sequence.hpp"
#include "hyperseq/serialize.hpp"
#include "hyperseq/ultrapower.hpp"

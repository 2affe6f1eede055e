#ifndef LFGDOP_LFGDOP_HPP
#define LFGDOP_LFGDOP_HPP

// Umbrella header.

#include "lfgdop/bank.hpp"
#include "lfgdop/canonical.hpp"
#include "lfgdop/chart.hpp"
#include "lfgdop/corpus.hpp"
#include "lfgdop/cstruct.hpp"
#include "lfgdop/derive.hpp"
#include "lfgdop/experiment.hpp"
#include "lfgdop/fragment.hpp"
#include "lfgdop/fstruct.hpp"
#include "lfgdop/representation.hpp"
#include "lfgdop/score.hpp"

#endif

#ifndef SCATTER_SCATTER_HPP
#define SCATTER_SCATTER_HPP

#include "scatter/arrangement.hpp"
#include "scatter/chy.hpp"
#include "scatter/error.hpp"
#include "scatter/hilbert.hpp"
#include "scatter/homotopy.hpp"
#include "scatter/ideal.hpp"
#include "scatter/matroid.hpp"
#include "scatter/rational.hpp"
#include "scatter/subset.hpp"

#endif  // SCATTER_SCATTER_HPP

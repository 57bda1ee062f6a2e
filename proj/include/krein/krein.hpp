#pragma once

#include "krein/core.hpp"
#include "krein/error.hpp"
#include "krein/family.hpp"
#include "krein/io.hpp"
#include "krein/riccati.hpp"
#include "krein/schur_order.hpp"
#include "krein/semigroup.hpp"
#include "krein/transfer.hpp"
#include "krein/version.hpp"

#pragma once

#include "lassodf/csv_io.hpp"
#include "lassodf/dataset.hpp"
#include "lassodf/dof_selection.hpp"
#include "lassodf/error.hpp"
#include "lassodf/lars_path.hpp"
#include "lassodf/linalg.hpp"
#include "lassodf/oracle.hpp"
#include "lassodf/sure_mc.hpp"

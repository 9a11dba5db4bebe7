#pragma once

#include "spectra/csv.hpp"
#include "spectra/error.hpp"
#include "spectra/gen_dim.hpp"
#include "spectra/ifs.hpp"
#include "spectra/log_value.hpp"
#include "spectra/lq_spectrum.hpp"
#include "spectra/manifest.hpp"
#include "spectra/measure_lab.hpp"
#include "spectra/parallel.hpp"
#include "spectra/projections.hpp"
#include "spectra/render.hpp"
#include "spectra/roots.hpp"
#include "spectra/split_binomial.hpp"
#include "spectra/svg_plot.hpp"
#include "spectra/system_io.hpp"
#include "spectra/type_class.hpp"

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nlc/energycoords.hpp"
#include "nlc/planar.hpp"
#include "nlc/reconstruct.hpp"

namespace nlc {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PlanarInitialData {
    std::vector<double> x, u, ut;
};

/// Embed planar data on the unit circle: n = (cos u, sin u, 0).
/// n_x comes from centered differencing of u.
DirectorInitialData planar_to_director(const PlanarInitialData& data);

PlanarInitialData make_constant_planar(double u0, double x_lo, double x_hi, int npts);

/// u = u0 + amp exp(-(x/width)^2), u_t = ut_amp exp(-(x/width)^2).
PlanarInitialData make_gauss_planar(double u0, double amp, double width, double ut_amp,
                                    double x_lo, double x_hi, int npts);

/// Genuinely non-planar data: polar angles u, w both gaussian bumps.
DirectorInitialData make_twist_director(double amp, double width, double x_lo, double x_hi,
                                        int npts);

/// The finite-time blowup family embedded as director data.
DirectorInitialData make_blowup_director(const MaterialParams& params,
                                         const BlowupProfileSpec& spec,
                                         const std::vector<double>& x_grid);

/// Header either "x,n1,n2,n3,nt1,nt2,nt3" (n_x by differencing) or "x,u,ut".
DirectorInitialData load_initial_csv(const std::string& path);
void save_initial_csv(const std::string& path, const DirectorInitialData& data);

void write_grid_csv(const std::string& path, const EnergyGrid& grid);
void write_slice_csv(const std::string& path, const TimeSlice& slice);
void write_blowup_csv(const std::string& path, const PlanarRun& run);

}  // namespace nlc

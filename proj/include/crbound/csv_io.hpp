#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "crbound/mcsim.hpp"
#include "crbound/spectrum.hpp"

namespace crbound::csv {

/// Thrown on malformed input; carries the 1-based row number.
struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int row)
        : std::runtime_error(msg + " (row " + std::to_string(row) + ")"), row(row) {}
    int row;
};

/// Full-precision scientific form for linear values, 6 significant
/// digits for dB values, "-inf" for underflowed magnitudes.
std::string format_linear(double v);
std::string format_db_of(double linear);

/// Generic spectrum, header `index,tau,l,value,multiplicity`. Multipole
/// labels write their (tau, l) fields and leave index empty; generic
/// labels do the opposite. Comment lines start with '#'.
void write_spectrum(std::ostream& os, const ModalSpectrum& spectrum,
                    const std::vector<std::string>& comments = {});
ModalSpectrum read_spectrum(std::istream& is);

void write_spectrum_file(const std::string& path, const ModalSpectrum& spectrum,
                         const std::vector<std::string>& comments = {});
ModalSpectrum read_spectrum_file(const std::string& path);

/// Trial report, header `index,target,emp_mean_re,emp_mean_im,emp_var,stderr,z_score`.
/// Electromagnetic modes render the index as tau:l:m.
void write_trial_report(std::ostream& os, const mcsim::TrialReport& report,
                        const std::vector<std::string>& comments = {});

/// Single bound curve, header `L,crb,crb_db`.
void write_crb_curve(std::ostream& os, const fisher::CrbCurve& curve,
                     const std::vector<std::string>& comments = {});

}  // namespace crbound::csv

#include "crbound/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace crbound::csv {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, int row, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string("bad ") + what + " value '" + s + "'", row);
    }
}

int parse_int(const std::string& s, int row, const char* what) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string("bad ") + what + " value '" + s + "'", row);
    }
}

}  // namespace

std::string format_linear(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::string format_db_of(double linear) {
    if (linear <= 0.0) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", 10.0 * std::log10(linear));
    return buf;
}

void write_spectrum(std::ostream& os, const ModalSpectrum& spectrum,
                    const std::vector<std::string>& comments) {
    for (const auto& c : comments) os << "# " << c << "\n";
    os << "index,tau,l,value,multiplicity\n";
    for (const auto& e : spectrum.entries()) {
        if (e.label.is_multipole())
            os << "," << *e.label.tau << "," << *e.label.l;
        else
            os << e.label.index << ",,";
        os << "," << format_linear(e.value) << "," << e.multiplicity << "\n";
    }
}

ModalSpectrum read_spectrum(std::istream& is) {
    std::string line;
    int row = 0;
    bool header_seen = false;
    std::vector<SpectrumEntry> entries;
    while (std::getline(is, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "index,tau,l,value,multiplicity")
                throw ParseError("expected header 'index,tau,l,value,multiplicity'", row);
            header_seen = true;
            continue;
        }
        const auto f = split_fields(line);
        if (f.size() != 5) throw ParseError("expected 5 fields", row);
        SpectrumEntry e;
        const bool has_tau = !f[1].empty(), has_l = !f[2].empty();
        if (has_tau != has_l) throw ParseError("tau and l must be given together", row);
        if (has_tau)
            e.label = ModeLabel::multipole(parse_int(f[1], row, "tau"), parse_int(f[2], row, "l"));
        else if (!f[0].empty())
            e.label = ModeLabel::generic(parse_int(f[0], row, "index"));
        else
            throw ParseError("row has neither index nor (tau, l)", row);
        e.value = parse_double(f[3], row, "value");
        if (e.value < 0.0) throw ParseError("negative spectrum value", row);
        e.multiplicity = parse_int(f[4], row, "multiplicity");
        if (e.multiplicity < 1) throw ParseError("multiplicity must be >= 1", row);
        entries.push_back(e);
    }
    if (!header_seen) throw ParseError("missing header", row == 0 ? 1 : row);
    return ModalSpectrum(std::move(entries), SpectrumOrdering::by_label);
}

void write_spectrum_file(const std::string& path, const ModalSpectrum& spectrum,
                         const std::vector<std::string>& comments) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_spectrum(os, spectrum, comments);
    if (!os) throw std::runtime_error("write failed: " + path);
}

ModalSpectrum read_spectrum_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    return read_spectrum(is);
}

void write_crb_curve(std::ostream& os, const fisher::CrbCurve& curve,
                     const std::vector<std::string>& comments) {
    for (const auto& c : comments) os << "# " << c << "\n";
    os << "L,crb,crb_db\n";
    for (const auto& p : curve.points)
        os << p.truncation << "," << format_linear(p.bound) << "," << format_db_of(p.bound)
           << "\n";
}

void write_trial_report(std::ostream& os, const mcsim::TrialReport& report,
                        const std::vector<std::string>& comments) {
    for (const auto& c : comments) os << "# " << c << "\n";
    os << "index,target,emp_mean_re,emp_mean_im,emp_var,stderr,z_score\n";
    for (const auto& s : report.per_mode) {
        if (s.generic_index >= 0)
            os << s.generic_index;
        else
            os << s.mode.tau << ":" << s.mode.l << ":" << s.mode.m;
        os << "," << format_linear(s.target) << "," << format_linear(s.emp_mean.real()) << ","
           << format_linear(s.emp_mean.imag()) << "," << format_linear(s.emp_var) << ","
           << format_linear(s.std_error) << "," << format_linear(s.z_score) << "\n";
    }
}

}  // namespace crbound::csv

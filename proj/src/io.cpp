#include "tbsim/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace tbsim {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out << content;
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed: " + tmp + " -> " + path);
}

std::string trace_to_csv(const DynamicsTrace& trace) {
    std::string out = "t,n_sp,flux_s,flux_as,cum_s,cum_as\n";
    for (std::size_t i = 0; i < trace.grid.size(); ++i) {
        out += format_number(trace.grid[i]) + ',' + format_number(trace.n_sp[i]) + ',' +
               format_number(trace.flux_s[i]) + ',' + format_number(trace.flux_as[i]) +
               ',' + format_number(trace.cum_s[i]) + ',' + format_number(trace.cum_as[i]) +
               '\n';
    }
    return out;
}

std::string franson_to_csv(const FransonResult& result) {
    std::string out = "theta,n1,n2,stderr1,stderr2\n";
    for (std::size_t i = 0; i < result.theta_grid.size(); ++i) {
        out += format_number(result.theta_grid[i]) + ',' +
               format_number(result.counts1[i]) + ',' + format_number(result.counts2[i]) +
               ',' + format_number(result.stderr1[i]) + ',' +
               format_number(result.stderr2[i]) + '\n';
    }
    return out;
}

} // namespace tbsim

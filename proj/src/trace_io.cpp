#include "psplit/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace psplit {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string trace_csv(const RunTrace& trace, std::size_t num_blocks) {
    std::ostringstream out;
    out << "iter,phi,pi,alpha,max_primal_residual,max_dual_residual";
    for (std::size_t i = 1; i <= num_blocks; ++i) out << ",backtracks_" << i;
    for (std::size_t i = 1; i <= num_blocks; ++i) out << ",stepsize_" << i;
    out << '\n';
    for (const auto& r : trace.records) {
        out << r.iter << ',' << format_double(r.phi) << ',' << format_double(r.pi) << ',' << format_double(r.alpha)
            << ',' << format_double(r.max_primal_residual()) << ',' << format_double(r.max_dual_residual());
        for (int b : r.backtracks) out << ',' << b;
        for (double s : r.stepsizes) out << ',' << format_double(s);
        out << '\n';
    }
    out << "# status=" << to_string(trace.status) << '\n';
    out << "# iterations=" << trace.iterations << '\n';
    return out.str();
}

std::string summary_json(const RunTrace& trace, const ProblemInstance& instance) {
    using json = nlohmann::json;
    json j;
    j["status"] = to_string(trace.status);
    j["iterations"] = trace.iterations;
    j["problem"] = instance.spec.name;
    j["problem_seed"] = instance.seed;
    j["z"] = trace.solution.z.entries();
    json w = json::array();
    for (const auto& wi : trace.solution.w) w.push_back(wi.entries());
    j["w"] = w;
    if (!trace.records.empty()) {
        j["max_primal_residual"] = trace.records.back().max_primal_residual();
        j["max_dual_residual"] = trace.records.back().max_dual_residual();
    } else {
        j["max_primal_residual"] = nullptr;
        j["max_dual_residual"] = nullptr;
    }
    j["kkt_residual"] = kkt_residual(instance.spec, trace.solution.z, trace.solution.w);
    j["distance_to_reference"] = norm(trace.solution.z - instance.reference.z_star);
    j["wall_time_s"] = trace.wall_time_seconds;
    if (!trace.message.empty()) j["message"] = trace.message;
    return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << contents;
    if (!f) throw std::runtime_error("failed writing " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace psplit

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gil/error.hpp"
#include "gil/trainer.hpp"

namespace gil::train {

namespace {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_metric_map(std::ostringstream& out, const std::map<std::string, double>& m,
                      const char* indent) {
    bool first = true;
    for (const auto& [k, v] : m) {
        if (!first) out << ",\n";
        first = false;
        out << indent << "\"" << k << "\": " << fmt_double(v);
    }
    out << "\n";
}

}  // namespace

std::string format_report(const RunReport& r) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"task\": \"" << (r.config.task == Task::node_classification ? "nc" : "lp")
        << "\",\n";
    out << "  \"seed\": " << r.config.seed << ",\n";
    out << "  \"config\": {\n";
    {
        std::istringstream cfg(format_config(r.config));
        std::string line;
        bool first = true;
        while (std::getline(cfg, line)) {
            const auto space = line.find(' ');
            if (space == std::string::npos) continue;
            if (!first) out << ",\n";
            first = false;
            out << "    \"" << line.substr(0, space) << "\": \"" << line.substr(space + 1) << "\"";
        }
        out << "\n  },\n";
    }
    out << "  \"epochs_run\": " << r.epochs_run << ",\n";
    out << "  \"best_epoch\": " << r.best_epoch << ",\n";
    out << "  \"val\": {\n";
    write_metric_map(out, r.val_metrics, "    ");
    out << "  },\n";
    out << "  \"test\": {\n";
    write_metric_map(out, r.test_metrics, "    ");
    out << "  },\n";
    out << "  \"audit\": {\n";
    out << "    \"ball_checks\": " << r.audit.ball_checks << ",\n";
    out << "    \"ball_violations\": " << r.audit.ball_violations << ",\n";
    out << "    \"max_scaled_norm\": " << fmt_double(r.audit.max_scaled_norm) << ",\n";
    out << "    \"lambda_checks\": " << r.audit.lambda_checks << ",\n";
    out << "    \"lambda_violations\": " << r.audit.lambda_violations << ",\n";
    out << "    \"max_lambda_dev\": " << fmt_double(r.audit.max_lambda_dev) << "\n";
    out << "  },\n";
    out << "  \"loss_curve\": [";
    for (size_t i = 0; i < r.loss_curve.size(); ++i) {
        if (i) out << ", ";
        out << fmt_double(r.loss_curve[i]);
    }
    out << "],\n";
    // the only field that varies between identical runs
    out << "  \"wall_clock_sec\": " << fmt_double(r.wall_clock_sec) << "\n";
    out << "}\n";
    return out.str();
}

void write_report(const RunReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write report: " + path);
    out << format_report(report);
}

}  // namespace gil::train

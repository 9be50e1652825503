#include "riskfloor/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <tuple>

#include <json.hpp>

namespace riskfloor {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::vector<CoverageReport> sorted_cells(std::vector<CoverageReport> rows) {
    auto key = [](const CoverageReport& r) {
        return std::tie(r.experiment, r.generator, r.cls, r.n, r.m_or_d, r.alpha, r.method);
    };
    std::stable_sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
    return rows;
}

void write_cells_csv(std::ostream& out, const std::vector<CoverageReport>& rows) {
    out << "experiment,generator,class,n,m_or_d,alpha,trials,rate,stderr,ceiling,pass,"
           "method,positivity_rate,refusals,true_risk\n";
    for (const auto& r : sorted_cells(rows)) {
        out << r.experiment << ',' << r.generator << ',' << r.cls << ',' << r.n << ',' << r.m_or_d << ','
            << format_double(r.alpha) << ',' << r.trials << ',' << format_double(r.miscoverage_rate) << ','
            << format_double(r.stderr_) << ',' << format_double(r.ceiling) << ',' << (r.pass ? "true" : "false")
            << ',' << r.method << ',' << format_double(r.positivity_rate) << ',' << r.refusals << ','
            << format_double(r.true_risk) << '\n';
    }
}

namespace {

nlohmann::json number_or_string(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

}  // namespace

std::string cells_json(const std::vector<CoverageReport>& rows) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& r : sorted_cells(rows)) {
        cells.push_back({
            {"experiment", r.experiment},
            {"generator", r.generator},
            {"class", r.cls},
            {"method", r.method},
            {"n", r.n},
            {"m_or_d", r.m_or_d},
            {"alpha", r.alpha},
            {"trials", r.trials},
            {"count", r.miscoverage_count},
            {"rate", r.miscoverage_rate},
            {"stderr", r.stderr_},
            {"ceiling", r.ceiling},
            {"positivity_rate", r.positivity_rate},
            {"refusals", r.refusals},
            {"true_risk", number_or_string(r.true_risk)},
            {"pass", r.pass},
        });
    }
    nlohmann::json out{{"cells", cells}, {"all_pass", all_pass(rows)}};
    return out.dump(2);
}

bool all_pass(const std::vector<CoverageReport>& rows) {
    return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.pass; });
}

}  // namespace riskfloor

#include "sparsegpt/costmodel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

namespace sparsegpt {

namespace {

constexpr double kTieTolerance = 1e-12;

double parse_field(std::string_view field, std::size_t line)
{
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
        field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
        field.remove_suffix(1);
    }
    double v = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw FormatError("omega table line " + std::to_string(line) + ": cannot parse '" + std::string(field) + "'");
    }
    return v;
}

} // namespace

OmegaCurve::OmegaCurve(std::vector<Anchor> anchors) : anchors_(std::move(anchors))
{
    if (anchors_.size() < 2) {
        throw DomainError("omega curve needs at least two anchors");
    }
    for (std::size_t i = 0; i < anchors_.size(); ++i) {
        const auto& p = anchors_[i];
        if (!(p.a >= 0.0 && p.a <= 1.0) || !(p.omega >= 2.0 && p.omega <= 3.0)) {
            throw DomainError("omega anchor outside [0,1] x [2,3]");
        }
        if (i > 0 && !(p.a > anchors_[i - 1].a)) {
            throw DomainError("omega anchors must have strictly increasing a");
        }
        if (i > 0 && p.omega < anchors_[i - 1].omega) {
            throw DomainError("omega curve must be non-decreasing in a");
        }
    }
    if (anchors_.front().a != 0.0 || anchors_.front().omega != 2.0) {
        throw DomainError("omega curve must start at (0, 2)");
    }
    if (anchors_.back().a != 1.0) {
        throw DomainError("omega curve must end at a = 1");
    }
}

OmegaCurve OmegaCurve::default_curve()
{
    return OmegaCurve({{0.0, 2.0}, {kDefaultAlpha, 2.0}, {1.0, kDefaultOmega}});
}

OmegaCurve OmegaCurve::classical() { return OmegaCurve({{0.0, 2.0}, {1.0, 3.0}}); }

OmegaCurve OmegaCurve::from_csv(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    std::vector<Anchor> anchors;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (!header) {
            if (line != "a,omega") {
                throw FormatError("omega table must start with header 'a,omega'");
            }
            header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw FormatError("omega table line " + std::to_string(lineno) + ": expected two fields");
        }
        const std::string_view sv(line);
        anchors.push_back({parse_field(sv.substr(0, comma), lineno), parse_field(sv.substr(comma + 1), lineno)});
    }
    if (!header) {
        throw FormatError("omega table is empty");
    }
    try {
        return OmegaCurve(std::move(anchors));
    } catch (const DomainError& e) {
        throw FormatError(std::string("omega table: ") + e.what());
    }
}

OmegaCurve OmegaCurve::from_csv_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open omega table '" + path + "'");
    }
    return from_csv(in);
}

OmegaCurve OmegaCurve::with_anchor(double a, double omega) const
{
    std::vector<Anchor> next;
    next.reserve(anchors_.size() + 1);
    for (const auto& p : anchors_) {
        if (p.a != a) {
            next.push_back(p);
        }
    }
    next.push_back({a, omega});
    std::sort(next.begin(), next.end(), [](const Anchor& x, const Anchor& y) { return x.a < y.a; });
    return OmegaCurve(std::move(next));
}

double OmegaCurve::evaluate(double a) const
{
    if (!(a >= 0.0 && a <= 1.0)) {
        throw DomainError("block exponent a must lie in [0, 1]");
    }
    auto hi = std::lower_bound(anchors_.begin(), anchors_.end(), a,
                               [](const Anchor& p, double x) { return p.a < x; });
    if (hi->a == a) {
        return hi->omega;
    }
    auto lo = hi - 1;
    const double t = (a - lo->a) / (hi->a - lo->a);
    return lo->omega + t * (hi->omega - lo->omega);
}

double OmegaCurve::alpha() const noexcept
{
    double alpha = 0.0;
    for (const auto& p : anchors_) {
        if (p.omega != 2.0) {
            break;
        }
        alpha = p.a;
    }
    return alpha;
}

CostReport cost_report(const OmegaCurve& curve, double a)
{
    CostReport r;
    r.a = a;
    r.hessian = curve.omega();
    r.inner = 2.0 + a;
    r.outer = 1.0 + curve.evaluate(a) - a;
    r.total = std::max({r.hessian, r.inner, r.outer});
    return r;
}

BlockExponent optimize_block_exponent(const OmegaCurve& curve, double step)
{
    if (!(step > 0.0 && step <= 0.01)) {
        throw DomainError("grid step must lie in (0, 0.01]");
    }
    const auto n = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
    BlockExponent best{0.0, cost_report(curve, 0.0).total};
    auto consider = [&](double a) {
        const double total = cost_report(curve, a).total;
        if (total < best.total - kTieTolerance) {
            best = {a, total};
        }
    };
    for (std::size_t k = 1; k <= n; ++k) {
        consider(std::min(1.0, static_cast<double>(k) * step));
    }
    consider(1.0);
    return best;
}

FlopLedger predicted_flops(std::size_t d, std::size_t block, const MatMulBackend& backend)
{
    if (block == 0 || block > d || d % block != 0) {
        throw ConfigError("predicted_flops needs block dividing d");
    }
    const std::uint64_t dd = static_cast<std::uint64_t>(d) * d;
    FlopLedger ledger;
    ledger[Phase::Error].mul = dd;
    ledger[Phase::Error].div = dd;
    ledger[Phase::Inner].mul = dd * (block + 1) / 2;
    ledger[Phase::Inner].add = ledger[Phase::Inner].mul;
    for (std::size_t end = block; end < d; end += block) {
        const std::size_t trailing = d - end;
        ledger[Phase::Outer] += predicted_matmul_counts(d, block, trailing, backend);
        ledger[Phase::Outer].add += static_cast<std::uint64_t>(d) * trailing;
    }
    ledger[Phase::Finalize].mul = dd;
    return ledger;
}

} // namespace sparsegpt

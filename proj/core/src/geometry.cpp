#include "critperc/geometry.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace critperc {

void PartitionSpec::validate() const {
    if (m < 1 || m % 2 == 0) throw std::invalid_argument("m must be a positive odd integer");
    if (s < 1 || t < 1) throw std::invalid_argument("s and t must be positive");
    if (3 * t > s) throw std::invalid_argument("t must not exceed s/3");
}

CellRegions cellRegions(const PartitionSpec& spec, int i, int j) {
    spec.validate();
    const int s = spec.s, t = spec.t;
    const SiteCoord c{2 * i * s, 2 * j * s};
    CellRegions cell;
    cell.i = i;
    cell.j = j;
    cell.box = Region::box(s, c);
    cell.outer = Region::annulus(s, s - t, c);
    cell.middle = Region::annulus(s - t, s - 2 * t, c);
    cell.inner = Region::annulus(s - 2 * t, s - 3 * t, c);
    cell.shell = Region::annulus(s, s - 3 * t, c);
    cell.corridorH = Region::rectangle(c.x + s - 2 * t, c.x + s + 2 * t, c.y, c.y + t);
    cell.corridorV = Region::rectangle(c.x, c.x + t, c.y + s - 2 * t, c.y + s + 2 * t);
    return cell;
}

const CellRegions& PartitionRegions::cell(int i, int j) const {
    if (!spec.validIndex(i, j)) throw std::out_of_range("cell index outside the partition");
    const int h = spec.halfRange();
    return cells[static_cast<std::size_t>((j + h) * spec.m + (i + h))];
}

PartitionRegions buildPartition(const PartitionSpec& spec, int n) {
    spec.validate();
    if (spec.m * spec.s > n) throw std::invalid_argument("partition does not fit: m*s > n");
    PartitionRegions out;
    out.spec = spec;
    out.n = n;
    const int h = spec.halfRange();
    for (int j = -h; j <= h; ++j)
        for (int i = -h; i <= h; ++i) out.cells.push_back(cellRegions(spec, i, j));
    out.whole = Region::box(spec.m * spec.s);
    Region q = Region::box(n).minus(out.whole);
    for (const auto& cell : out.cells) q = q.unite(cell.shell);
    out.q = std::move(q);
    return out;
}

void ConstantsConfig::validate() const {
    if (!(c10 > 0 && c15 > 0 && c17 > 0 && c18 > 0)) throw std::invalid_argument("constants must be positive");
}

PiModel PiModel::power(double exponent, double amplitude) {
    if (!(exponent >= 0.0) || !(amplitude > 0.0)) throw std::invalid_argument("power model needs exponent >= 0, amplitude > 0");
    PiModel m;
    m.kind_ = Kind::Power;
    m.exponent_ = exponent;
    m.amplitude_ = amplitude;
    return m;
}

PiModel PiModel::table(std::map<int, double> values) {
    if (values.size() < 2) throw std::invalid_argument("pi table needs at least two entries");
    for (const auto& [n, v] : values)
        if (n < 1 || !(v > 0.0)) throw std::invalid_argument("pi table entries need n >= 1 and positive values");
    PiModel m;
    m.kind_ = Kind::Table;
    m.table_ = std::move(values);
    const auto last = std::prev(m.table_.end());
    const auto before = std::prev(last);
    m.exponent_ = -std::log(last->second / before->second) / std::log(double(last->first) / double(before->first));
    return m;
}

PiModel PiModel::parse(const std::string& text) {
    std::istringstream in(text);
    std::string kind;
    std::getline(in, kind, ':');
    if (kind != "power") throw std::invalid_argument("unknown pi model: " + text);
    std::string field;
    double exponent = 0.5, amplitude = 1.0;
    if (std::getline(in, field, ':')) exponent = std::stod(field);
    if (std::getline(in, field, ':')) amplitude = std::stod(field);
    return power(exponent, amplitude);
}

double PiModel::operator()(int n) const {
    if (n < 0) throw std::invalid_argument("pi model evaluated at negative n");
    if (n == 0) return 1.0;
    if (kind_ == Kind::Power) return amplitude_ * std::pow(static_cast<double>(n), -exponent_);
    const auto hi = table_.lower_bound(n);
    if (hi != table_.end() && hi->first == n) return hi->second;
    if (hi == table_.begin()) {
        // Below the table: extrapolate with the first segment's slope.
        const auto next = std::next(hi);
        const double slope = std::log(next->second / hi->second) / std::log(double(next->first) / double(hi->first));
        return hi->second * std::pow(double(n) / hi->first, slope);
    }
    if (hi == table_.end()) {
        const auto last = std::prev(table_.end());
        return last->second * std::pow(double(n) / last->first, -exponent_);
    }
    const auto lo = std::prev(hi);
    const double slope = std::log(hi->second / lo->second) / std::log(double(hi->first) / double(lo->first));
    return lo->second * std::pow(double(n) / lo->first, slope);
}

double PiModel::exponent() const { return exponent_; }

std::string PiModel::describe() const {
    std::ostringstream os;
    if (kind_ == Kind::Power)
        os << "power:" << exponent_ << ':' << amplitude_;
    else
        os << "table[" << table_.size() << " entries, tail exponent " << exponent_ << ']';
    return os.str();
}

PartitionSpec ParameterChoice::partitionFor(int n) const {
    const int s = n / inverseX;
    return {inverseX, s, static_cast<int>(std::floor(epsilon * s))};
}

int firstViolation(const ParameterChoice& choice, double a, double b, const ConstantsConfig& constants,
                   const PiModel& pi, int n) {
    const double invX = choice.inverseX;
    const int s = n / choice.inverseX;  // floor(xn) for x = 1/inverseX
    const int t = static_cast<int>(std::floor(choice.epsilon * s));
    const double target = static_cast<double>(n) * n * pi(n);
    const double third = (b - a) / 3.0;
    const double ss = static_cast<double>(s) * s * pi(s);
    if (!(constants.c17 * ss * invX * invX >= a * target)) return 1;
    if (!(constants.c18 * ss <= third * target)) return 2;
    const double lead = std::max(4.0 * constants.c10, constants.c15);
    if (!(lead * invX * invX * static_cast<double>(t) * s * pi(t) <= third * target)) return 3;
    if (n - choice.inverseX * s > t) return 4;
    if (t < 1) return 5;
    return 0;
}

ParameterSearch chooseParameters(double a, double b, const ConstantsConfig& constants, const PiModel& pi,
                                 const NRange& range) {
    if (!(a > 0.0) || !(b > a)) throw std::invalid_argument("need 0 < a < b");
    constants.validate();
    if (range.first < 1 || range.last < range.first) throw std::invalid_argument("invalid n range");
    if (!(pi.exponent() < 1.0)) throw std::invalid_argument("pi model exponent must be strictly below 1");

    static constexpr const char* names[] = {"", "size lower bound (inequality I)", "size upper bound (inequality II)",
                                            "corridor bound (inequality III)", "covering condition n - ms <= t",
                                            "annulus width t >= 1"};
    ParameterSearch result;
    int lastViolation = 0, lastViolationN = 0;
    for (int inverseX = 3; inverseX <= 31; inverseX += 2) {
        for (int k = 4; k <= 24; ++k) {
            ParameterChoice candidate{inverseX, std::ldexp(1.0, -k), 0};
            // Smallest N with a clean tail [N, last].
            int N = range.last + 1;
            for (int n = range.last; n >= range.first; --n) {
                const int v = firstViolation(candidate, a, b, constants, pi, n);
                if (v != 0) {
                    lastViolation = v;
                    lastViolationN = n;
                    break;
                }
                N = n;
            }
            if (N <= range.last && 4 * N <= range.last) {
                candidate.N = N;
                result.choice = candidate;
                std::ostringstream os;
                os << "feasible: 1/x=" << inverseX << " eps=2^-" << k << " N=" << N << " (range " << range.first
                   << ".." << range.last << ", pi " << pi.describe() << ")";
                result.report = os.str();
                return result;
            }
        }
    }
    std::ostringstream os;
    os << "infeasible within 1/x in {3..31}, eps in {2^-4..2^-24}, n in " << range.first << ".." << range.last
       << "; last candidate first violated " << names[lastViolation] << " at n=" << lastViolationN;
    result.report = os.str();
    return result;
}

}  // namespace critperc

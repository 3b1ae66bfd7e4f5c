#include "tsir/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>

#include "tsir/errors.hpp"
#include "tsir/number_format.hpp"

namespace tsir {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string describe_name(const CoefficientFunction::Kind& k) {
  return std::visit(overloaded{
                        [](const coeff::Constant&) { return std::string("constant"); },
                        [](const coeff::Reciprocal&) { return std::string("reciprocal"); },
                        [](const coeff::LogNormalPdf&) { return std::string("log-normal density"); },
                        [](const coeff::VonBertalanffy&) { return std::string("von Bertalanffy"); },
                        [](const coeff::Sinusoid&) { return std::string("sinusoid"); },
                        [](const coeff::Tabulated& t) { return "table " + t.source; },
                    },
                    k);
}

}  // namespace

CoefficientFunction::CoefficientFunction(Kind kind) : kind_(std::move(kind)), name_(describe_name(kind_)) {}

CoefficientFunction CoefficientFunction::table(std::vector<std::pair<double, double>> knots, std::string source) {
  if (knots.size() < 2) throw Error(Errc::InvalidArgument, "table needs at least two knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i].first) || !std::isfinite(knots[i].second))
      throw Error(Errc::InvalidArgument, "table knots must be finite");
    if (i > 0 && !(knots[i].first > knots[i - 1].first))
      throw Error(Errc::InvalidArgument, "table times must be strictly increasing");
  }
  return CoefficientFunction(coeff::Tabulated{std::move(source), std::move(knots)});
}

double CoefficientFunction::operator()(Time t) const {
  return std::visit(
      overloaded{
          [](const coeff::Constant& k) { return k.value; },
          [t](const coeff::Reciprocal& k) { return k.a / (t + k.shift); },
          [t](const coeff::LogNormalPdf&) {
            if (t <= 0) return 0.0;
            const double l = std::log(t);
            return std::exp(-0.5 * l * l) / (t * std::sqrt(2.0 * std::numbers::pi));
          },
          [t](const coeff::VonBertalanffy& k) { return k.s * (1.0 - std::exp(-k.r * t - k.d)); },
          [t](const coeff::Sinusoid& k) { return k.base + k.amp * std::sin(k.m * t); },
          [t](const coeff::Tabulated& k) {
            const auto& pts = k.knots;
            if (t < pts.front().first || t > pts.back().first)
              throw Error(Errc::NotInDomain, "table " + k.source + " evaluated outside its range", t);
            auto it = std::lower_bound(pts.begin(), pts.end(), t,
                                       [](const std::pair<double, double>& p, double v) { return p.first < v; });
            if (it->first == t) return it->second;
            auto prev = it - 1;
            const double w = (t - prev->first) / (it->first - prev->first);
            return prev->second + w * (it->second - prev->second);
          },
      },
      kind_);
}

std::optional<double> CoefficientFunction::constant_value() const {
  if (auto* c = std::get_if<coeff::Constant>(&kind_)) return c->value;
  return std::nullopt;
}

std::string CoefficientFunction::literal() const {
  auto f = format_shortest;
  return std::visit(overloaded{
                        [&](const coeff::Constant& k) { return "const:" + f(k.value); },
                        [&](const coeff::Reciprocal& k) { return "recip:a=" + f(k.a) + ",shift=" + f(k.shift); },
                        [&](const coeff::LogNormalPdf&) { return std::string("lognormpdf"); },
                        [&](const coeff::VonBertalanffy& k) {
                          return "vonbert:s=" + f(k.s) + ",r=" + f(k.r) + ",d=" + f(k.d);
                        },
                        [&](const coeff::Sinusoid& k) {
                          return "sin:base=" + f(k.base) + ",amp=" + f(k.amp) + ",m=" + f(k.m);
                        },
                        [&](const coeff::Tabulated& k) { return "table:" + k.source; },
                    },
                    kind_);
}

namespace {

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

/// Parses `k1=v1,k2=v2` against the allowed keys; every key is required.
std::map<std::string, double> parse_params(std::string_view body, std::size_t col,
                                           std::initializer_list<const char*> keys) {
  std::map<std::string, double> out;
  std::size_t pos = 0;
  while (pos <= body.size() && !body.empty()) {
    auto end = body.find(',', pos);
    if (end == std::string_view::npos) end = body.size();
    auto item = strip(body.substr(pos, end - pos));
    auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(1, static_cast<int>(col + pos + 1), "expected key=value, got '" + std::string(item) + "'");
    std::string key(strip(item.substr(0, eq)));
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return key == k; }) == keys.end())
      throw ParseError(1, static_cast<int>(col + pos + 1), "unknown parameter '" + key + "'");
    double v = 0;
    if (!parse_number(strip(item.substr(eq + 1)), v))
      throw ParseError(1, static_cast<int>(col + pos + eq + 2), "bad value for '" + key + "'");
    out[key] = v;
    pos = end + 1;
  }
  for (const char* k : keys) {
    if (!out.count(k)) throw ParseError(1, static_cast<int>(col + 1), std::string("missing parameter '") + k + "'");
  }
  return out;
}

}  // namespace

CoefficientFunction parse_coefficient(std::string_view literal, const std::filesystem::path& base_dir) {
  const auto text = strip(literal);
  const auto colon = text.find(':');
  const std::string head(text.substr(0, colon));
  const auto body = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  const std::size_t col = colon == std::string_view::npos ? text.size() : colon + 1;

  if (head == "const") {
    double v = 0;
    if (!parse_number(strip(body), v)) throw ParseError(1, static_cast<int>(col + 1), "const needs a number");
    return CoefficientFunction::constant(v);
  }
  if (head == "recip") {
    auto p = parse_params(body, col, {"a", "shift"});
    return CoefficientFunction(coeff::Reciprocal{p["a"], p["shift"]});
  }
  if (head == "lognormpdf") {
    if (colon != std::string_view::npos) throw ParseError(1, static_cast<int>(col), "lognormpdf takes no parameters");
    return CoefficientFunction(coeff::LogNormalPdf{});
  }
  if (head == "vonbert") {
    auto p = parse_params(body, col, {"s", "r", "d"});
    return CoefficientFunction(coeff::VonBertalanffy{p["s"], p["r"], p["d"]});
  }
  if (head == "sin") {
    auto p = parse_params(body, col, {"base", "amp", "m"});
    return CoefficientFunction(coeff::Sinusoid{p["base"], p["amp"], p["m"]});
  }
  if (head == "table") {
    const std::string source(strip(body));
    if (source.empty()) throw ParseError(1, static_cast<int>(col + 1), "table needs a file name");
    std::filesystem::path path(source);
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    return CoefficientFunction::table(read_table_csv(path), source);
  }
  throw ParseError(1, 1, "unknown coefficient kind '" + head + "'");
}

std::vector<std::pair<double, double>> read_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open table " + path.string());
  std::vector<std::pair<double, double>> knots;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = strip(line);
    if (s.empty() || s.front() == '#') continue;
    auto comma = s.find(',');
    double t = 0, v = 0;
    const bool ok = comma != std::string_view::npos && parse_number(strip(s.substr(0, comma)), t) &&
                    parse_number(strip(s.substr(comma + 1)), v);
    if (!ok) {
      if (knots.empty() && lineno == 1) continue;  // header
      throw ParseError(lineno, 1, "table " + path.string() + ": expected 't,value'");
    }
    knots.emplace_back(t, v);
  }
  return knots;
}

}  // namespace tsir

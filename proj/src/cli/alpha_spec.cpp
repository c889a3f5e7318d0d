#include "dseries/cli/alpha_spec.hpp"

#include <regex>
#include <sstream>

#include "dseries/errors.hpp"

namespace dseries::cli {

namespace {

mpz_class parse_integer(const std::string& text, const std::string& what) {
  static const std::regex kInt(R"([+-]?\d+)");
  if (!std::regex_match(text, kInt)) throw InvalidArgument("bad " + what + ": '" + text + "'");
  return mpz_class(text[0] == '+' ? text.substr(1) : text);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) parts.push_back(trim(item));
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

std::pair<mpz_class, mpz_class> parse_fraction(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return {parse_integer(text, "integer"), 1};
  return {parse_integer(trim(text.substr(0, slash)), "numerator"),
          parse_integer(trim(text.substr(slash + 1)), "denominator")};
}

SourceParams parse_surd(const std::string& body) {
  static const std::regex kSurd(
      R"(\(\s*([+-]?\d+)\s*([+-])\s*(\d+)\s*\*\s*sqrt\(\s*(\d+)\s*\)\s*\)\s*(?:/\s*([+-]?\d+))?)");
  std::smatch m;
  if (!std::regex_match(body, m, kSurd)) {
    throw InvalidArgument("bad surd '" + body + "' (expected (p+r*sqrt(d))/s)");
  }
  SurdParams s;
  s.p = parse_integer(m[1], "p");
  s.r = parse_integer(m[3], "r");
  if (m[2] == "-") s.r = -s.r;
  s.d = parse_integer(m[4], "d");
  s.s = m[5].matched ? parse_integer(m[5], "s") : mpz_class(1);
  return s;
}

SourceParams parse_liouville(const std::string& body) {
  LiouvilleSpec spec;
  if (!trim(body).empty()) {
    for (const auto& item : split(body, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw InvalidArgument("liouville parameter needs key=value: '" + item + "'");
      const std::string key = trim(item.substr(0, eq)), value = trim(item.substr(eq + 1));
      if (key == "schedule") {
        if (value == "factorial") {
          spec.schedule = ExponentSchedule::Factorial;
        } else if (value == "tower100") {
          spec.schedule = ExponentSchedule::Tower100;
        } else {
          throw InvalidArgument("unknown schedule '" + value + "' (factorial or tower100)");
        }
      } else if (key == "digits") {
        spec.digits.clear();
        for (char c : value) {
          if (c != '1' && c != '3') throw InvalidArgument("liouville digits must be 1 or 3");
          spec.digits.push_back(c - '0');
        }
        if (spec.digits.empty()) throw InvalidArgument("liouville digits must not be empty");
      } else if (key == "base") {
        std::tie(spec.a, spec.q) = parse_fraction(value);
      } else if (key == "start") {
        const mpz_class k = parse_integer(value, "start");
        if (k < 1 || k > 1000000) throw InvalidArgument("start must lie in [1, 10^6]");
        spec.start = static_cast<std::uint32_t>(k.get_ui());
      } else {
        throw InvalidArgument("unknown liouville parameter '" + key + "'");
      }
    }
  }
  validate(spec);
  return spec;
}

SourceParams parse_cf(const std::string& body) {
  const std::string t = trim(body);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') {
    throw InvalidArgument("continued fraction must look like [a0;a1,...,(b1,...)]");
  }
  const std::string inner = t.substr(1, t.size() - 2);
  CfStreamParams cf;
  const auto semi = inner.find(';');
  cf.prefix.push_back(parse_integer(trim(inner.substr(0, semi)), "a0"));
  if (semi == std::string::npos) return cf;
  std::string rest = trim(inner.substr(semi + 1));
  const auto open = rest.find('(');
  std::string period;
  if (open != std::string::npos) {
    if (rest.back() != ')') throw InvalidArgument("repeating block must close the list");
    period = rest.substr(open + 1, rest.size() - open - 2);
    rest = trim(rest.substr(0, open));
    if (!rest.empty()) {
      if (rest.back() != ',') throw InvalidArgument("expected ',' before the repeating block");
      rest.pop_back();
    }
    for (const auto& item : split(period, ',')) cf.period.push_back(parse_integer(item, "partial quotient"));
    if (cf.period.empty()) throw InvalidArgument("repeating block must not be empty");
  }
  if (!trim(rest).empty()) {
    for (const auto& item : split(rest, ',')) cf.prefix.push_back(parse_integer(item, "partial quotient"));
  }
  return cf;
}

}  // namespace

SourceParams parse_alpha(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw InvalidArgument("alpha spec needs a kind prefix (rat:, surd:, const:, liouville:, cf:)");
  }
  const std::string kind = text.substr(0, colon), body = text.substr(colon + 1);
  if (kind == "rat") {
    const auto [a, q] = parse_fraction(trim(body));
    if (q <= 0) throw InvalidArgument("rational denominator must be positive");
    mpq_class v(a, q);
    v.canonicalize();
    return RationalParams{v.get_num(), v.get_den()};
  }
  if (kind == "surd") return parse_surd(trim(body));
  if (kind == "const") return ConstantParams{constant_from_name(trim(body))};
  if (kind == "liouville") return parse_liouville(body);
  if (kind == "cf") return parse_cf(body);
  throw InvalidArgument("unknown alpha kind '" + kind + "'");
}

std::string format_alpha(const SourceParams& params) {
  std::ostringstream os;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RationalParams>) {
          os << "rat:" << p.a << "/" << p.q;
        } else if constexpr (std::is_same_v<T, SurdParams>) {
          os << "surd:(" << p.p << (p.r < 0 ? "-" : "+") << abs(p.r) << "*sqrt(" << p.d << "))/" << p.s;
        } else if constexpr (std::is_same_v<T, ConstantParams>) {
          os << "const:" << to_string(p.name);
        } else if constexpr (std::is_same_v<T, LiouvilleSpec>) {
          os << "liouville:schedule=" << to_string(p.schedule) << ",digits=";
          for (int d : p.digits) os << d;
          os << ",base=" << p.a << "/" << p.q << ",start=" << p.start;
        } else {
          os << "cf:[" << p.prefix[0];
          bool first = true;
          auto sep = [&] {
            os << (first ? ";" : ",");
            first = false;
          };
          for (std::size_t i = 1; i < p.prefix.size(); ++i) {
            sep();
            os << p.prefix[i];
          }
          if (!p.period.empty()) {
            sep();
            os << "(";
            for (std::size_t i = 0; i < p.period.size(); ++i) os << (i ? "," : "") << p.period[i];
            os << ")";
          }
          os << "]";
        }
      },
      params);
  return os.str();
}

}  // namespace dseries::cli

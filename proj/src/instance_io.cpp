#include "ampcs/instance_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

namespace ampcs {

InstanceFormatError::InstanceFormatError(int line, const std::string& message)
    : std::runtime_error(fmt::format("line {}: {}", line, message)), line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank, non-comment line; nullopt at end of input.
  std::optional<std::string> next() {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++line_;
      std::string text = trim(raw);
      if (text.empty() || text.front() == '#') continue;
      return text;
    }
    return std::nullopt;
  }

  std::string expect(const char* what) {
    auto text = next();
    if (!text) throw InstanceFormatError(line_ + 1, fmt::format("unexpected end of input, expected {}", what));
    return *text;
  }

  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 0;
};

double parse_double(const std::string& token, int line) {
  const std::string t = trim(token);
  double value = 0.0;
  const auto* begin = t.data();
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (t.empty() || ec != std::errc() || ptr != end) {
    throw InstanceFormatError(line, fmt::format("malformed number '{}'", t));
  }
  return value;
}

std::vector<std::string> split_on(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream stream(text);
  while (std::getline(stream, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::vector<std::string> split_ws(const std::string& text) {
  std::vector<std::string> parts;
  std::istringstream stream(text);
  std::string part;
  while (stream >> part) parts.push_back(part);
  return parts;
}

std::vector<std::string> keyed(LineReader& reader, const std::string& key) {
  const std::string text = reader.expect(key.c_str());
  auto tokens = split_ws(text);
  if (tokens.empty() || tokens.front() != key) {
    throw InstanceFormatError(reader.line(), fmt::format("expected '{}' entry", key));
  }
  tokens.erase(tokens.begin());
  if (tokens.empty()) throw InstanceFormatError(reader.line(), fmt::format("'{}' has no value", key));
  return tokens;
}

Eigen::Index parse_count(LineReader& reader, const std::string& key) {
  const auto tokens = keyed(reader, key);
  long long value = 0;
  const auto& t = tokens.front();
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (tokens.size() != 1 || ec != std::errc() || ptr != t.data() + t.size() || value < 1) {
    throw InstanceFormatError(reader.line(), fmt::format("'{}' must be a positive integer", key));
  }
  return static_cast<Eigen::Index>(value);
}

void expect_section(LineReader& reader, const char* name) {
  const std::string text = reader.expect(name);
  if (text != name) {
    throw InstanceFormatError(reader.line(), fmt::format("expected section '{}', got '{}'", name, text));
  }
}

ComplexVector read_pairs(LineReader& reader, Eigen::Index count, const char* name) {
  expect_section(reader, name);
  ComplexVector v = ComplexVector::zeros(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const std::string text = reader.expect("a re,im pair");
    const auto parts = split_on(text, ',');
    if (parts.size() != 2) {
      throw InstanceFormatError(reader.line(), fmt::format("section '{}' expects 're,im' per line", name));
    }
    v.re[i] = parse_double(parts[0], reader.line());
    v.im[i] = parse_double(parts[1], reader.line());
  }
  return v;
}

void write_pairs(const ComplexVector& v, const char* name, std::ostream& out) {
  out << name << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i) out << fmt::format("{},{}\n", v.re[i], v.im[i]);
}

}  // namespace

void write_instance(const ProblemInstance& instance, std::ostream& out) {
  const auto M = instance.A.rows();
  const auto N = instance.A.cols();
  out << "# ampcs-instance 1\n";
  out << fmt::format("M {}\nN {}\nsigma_x2 {}\n", M, N, instance.prior.sigma_x2);
  const Vector& gamma0 = instance.prior.gamma0;
  const bool uniform = gamma0.size() > 0 && (gamma0.array() == gamma0[0]).all();
  out << "gamma0";
  if (uniform) {
    out << ' ' << fmt::format("{}", gamma0[0]);
  } else {
    for (Eigen::Index n = 0; n < gamma0.size(); ++n) out << ' ' << fmt::format("{}", gamma0[n]);
  }
  out << '\n';
  out << fmt::format("sigma_w2 {}\nseed {}\n", instance.sigma_w2, instance.seed);
  out << "A\n";
  for (Eigen::Index m = 0; m < M; ++m) {
    for (Eigen::Index n = 0; n < N; ++n) {
      if (n > 0) out << ',';
      out << fmt::format("{}", instance.A(m, n));
    }
    out << '\n';
  }
  write_pairs(instance.x_true, "x", out);
  write_pairs(instance.w, "w", out);
  write_pairs(instance.y, "y", out);
}

ProblemInstance read_instance(std::istream& in) {
  LineReader reader(in);
  ProblemInstance instance;

  const Eigen::Index M = parse_count(reader, "M");
  const Eigen::Index N = parse_count(reader, "N");

  const auto sx = keyed(reader, "sigma_x2");
  instance.prior.sigma_x2 = parse_double(sx.front(), reader.line());
  if (!(instance.prior.sigma_x2 > 0.0)) {
    throw InstanceFormatError(reader.line(), "sigma_x2 must be positive");
  }

  const auto g = keyed(reader, "gamma0");
  if (g.size() != 1 && static_cast<Eigen::Index>(g.size()) != N) {
    throw InstanceFormatError(reader.line(), fmt::format("gamma0 needs 1 or {} values", N));
  }
  instance.prior.gamma0.resize(N);
  for (Eigen::Index n = 0; n < N; ++n) {
    const double value = parse_double(g[g.size() == 1 ? 0 : static_cast<std::size_t>(n)], reader.line());
    if (!(value >= 0.0 && value <= 1.0)) throw InstanceFormatError(reader.line(), "gamma0 outside [0,1]");
    instance.prior.gamma0[n] = value;
  }

  const auto sw = keyed(reader, "sigma_w2");
  instance.sigma_w2 = parse_double(sw.front(), reader.line());
  if (!(instance.sigma_w2 >= 0.0)) throw InstanceFormatError(reader.line(), "sigma_w2 must be >= 0");

  const auto seed = keyed(reader, "seed");
  {
    const auto& t = seed.front();
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), instance.seed);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
      throw InstanceFormatError(reader.line(), "seed must be an unsigned integer");
    }
  }

  expect_section(reader, "A");
  Eigen::MatrixXd A(M, N);
  for (Eigen::Index m = 0; m < M; ++m) {
    const std::string text = reader.expect("a matrix row");
    const auto parts = split_on(text, ',');
    if (static_cast<Eigen::Index>(parts.size()) != N) {
      throw InstanceFormatError(reader.line(), fmt::format("matrix row has {} entries, expected {}", parts.size(), N));
    }
    for (Eigen::Index n = 0; n < N; ++n) A(m, n) = parse_double(parts[static_cast<std::size_t>(n)], reader.line());
  }
  instance.A = RealMatrix(std::move(A));

  instance.x_true = read_pairs(reader, N, "x");
  instance.w = read_pairs(reader, M, "w");
  instance.y = read_pairs(reader, M, "y");

  if (auto extra = reader.next()) {
    throw InstanceFormatError(reader.line(), "trailing content after 'y' section");
  }
  return instance;
}

ProblemInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open instance file '{}'", path));
  return read_instance(in);
}

void save_instance(const ProblemInstance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write instance file '{}'", path));
  write_instance(instance, out);
  if (!out) throw std::runtime_error(fmt::format("error writing instance file '{}'", path));
}

}  // namespace ampcs

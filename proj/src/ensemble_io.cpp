#include "qtomo/ensemble_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "qtomo/errors.hpp"

namespace qtomo {
namespace {

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw PreconditionError("ensemble file: bad number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

void write_ensemble(std::ostream& os, const UnitaryEnsemble& e) {
  os << e.n() << ' ' << e.m() << ' ' << to_string(e.provenance()) << '\n';
  for (const auto& u : e.unitaries()) {
    for (int r = 0; r < e.n(); ++r) {
      for (int c = 0; c < e.n(); ++c) {
        if (c) os << ' ';
        os << format17(u(r, c).real()) << ',' << format17(u(r, c).imag());
      }
      os << '\n';
    }
  }
}

UnitaryEnsemble read_ensemble(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw PreconditionError("ensemble file: missing header");
  std::istringstream hs(header);
  int n = 0;
  int m = 0;
  std::string provenance;
  if (!(hs >> n >> m >> provenance) || n < 1 || m < 1) {
    throw PreconditionError("ensemble file: header must be 'n m provenance'");
  }
  std::vector<CMatrix> us(m, CMatrix(n, n));
  for (int line_no = 0; line_no < n * m; ++line_no) {
    std::string line;
    if (!std::getline(is, line)) throw PreconditionError("ensemble file: truncated");
    std::istringstream ls(line);
    std::string token;
    int c = 0;
    while (ls >> token) {
      if (c >= n) throw PreconditionError("ensemble file: too many entries in a row");
      const auto comma = token.find(',');
      if (comma == std::string::npos) throw PreconditionError("ensemble file: entry must be 're,im'");
      const std::string_view t(token);
      us[line_no / n](line_no % n, c) = Complex(parse_double(t.substr(0, comma)),
                                                parse_double(t.substr(comma + 1)));
      ++c;
    }
    if (c != n) throw PreconditionError("ensemble file: row has wrong number of entries");
  }
  return UnitaryEnsemble(std::move(us), provenance_from_string(provenance));
}

void save_ensemble(const std::filesystem::path& path, const UnitaryEnsemble& e) {
  std::ostringstream os;
  write_ensemble(os, e);
  write_file_atomically(path, os.str());
}

UnitaryEnsemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open ensemble file " + path.string());
  return read_ensemble(in);
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace qtomo

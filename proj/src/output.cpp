#include "lbr/output.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <map>
#include <thread>

#include "lbr/format.hpp"
#include "lbr/parallel.hpp"

namespace lbr {

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {
std::atomic<unsigned> g_workers{std::max(1u, std::thread::hardware_concurrency())};
}

unsigned default_workers() { return g_workers.load(); }
void set_default_workers(unsigned workers) {
  g_workers.store(workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers);
}

std::string RunHeader::line() const {
  std::string s = command + " seed=" + std::to_string(seed) + " config: " + config;
  if (!extra.empty()) s += " | " + extra;
  return s;
}

void write_paths_csv(std::ostream& out, const RunHeader& header, std::span<const SampledPath> paths) {
  out << "# " << header.line() << "\n";
  out << "t,value,path_id\n";
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const auto& path = paths[p];
    for (std::size_t i = 0; i < path.values.size(); ++i)
      out << format_real(path.grid[i]) << ',' << format_real(path.values[i]) << ',' << p << '\n';
  }
}

void write_field_csv(std::ostream& out, const RunHeader& header, const MaxStableField& field) {
  out << "# " << header.line() << "\n";
  out << "t,eta,argmax_id\n";
  for (std::size_t i = 0; i < field.eta.size(); ++i)
    out << format_real(field.grid[i]) << ',' << format_real(field.eta[i]) << ',' << field.argmax_id[i] << '\n';
}

void write_replicas_csv(std::ostream& out, const RunHeader& header, std::span<const SampledPath> paths) {
  out << "# " << header.line() << "\n";
  out << "replica,t,value\n";
  for (std::size_t p = 0; p < paths.size(); ++p)
    for (std::size_t i = 0; i < paths[p].values.size(); ++i)
      out << p << ',' << format_real(paths[p].grid[i]) << ',' << format_real(paths[p].values[i]) << '\n';
}

namespace {

std::string colour_for(std::size_t k) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};
  return palette[k % std::size(palette)];
}

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '&': o += "&amp;"; break;
      case '-': o += (!o.empty() && o.back() == '-') ? " -" : "-"; break;  // no "--" inside comments
      default: o += c;
    }
  }
  return o;
}

}  // namespace

void write_field_svg(std::ostream& out, const RunHeader& header, const MaxStableField& field) {
  constexpr double W = 800, H = 400, M = 40;
  const auto t = field.grid.points();
  double lo = *std::min_element(field.eta.begin(), field.eta.end());
  double hi = *std::max_element(field.eta.begin(), field.eta.end());
  if (hi - lo < 1e-9) hi = lo + 1;
  const double t0 = t.front(), t1 = t.size() > 1 ? t.back() : t.front() + 1;
  auto X = [&](double x) { return M + (x - t0) / (t1 - t0) * (W - 2 * M); };
  auto Y = [&](double y) { return H - M - (y - lo) / (hi - lo) * (H - 2 * M); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<!-- " << xml_escape(header.line()) << " -->\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (field.particles) {
    for (const auto& p : *field.particles) {
      std::string d;
      bool pen = false;
      for (std::size_t i = 0; i < t.size(); ++i) {
        const double v = p.path.values[i];
        if (!(v > kNegInf)) {
          pen = false;
          continue;
        }
        d += (pen ? " L" : " M") + format_real(X(t[i])) + "," + format_real(Y(std::max(p.position + v, lo)));
        pen = true;
      }
      if (!d.empty()) out << "<path d=\"" << d << "\" stroke=\"#cccccc\" fill=\"none\" stroke-width=\"0.5\"/>\n";
    }
  }
  std::map<ParticleId, std::size_t> colours;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto [it, fresh] = colours.try_emplace(field.argmax_id[i], colours.size());
    const double x0 = X(t[i]);
    const double x1 = i + 1 < t.size() ? X(t[i + 1]) : x0 + 2;
    out << "<line x1=\"" << format_real(x0) << "\" y1=\"" << format_real(Y(field.eta[i])) << "\" x2=\""
        << format_real(x1) << "\" y2=\"" << format_real(Y(field.eta[i])) << "\" stroke=\"" << colour_for(it->second)
        << "\" stroke-width=\"2\"/>\n";
  }
  out << "<text x=\"" << M << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"12\">eta(t), colour = argmax "
      << "particle; range [" << format_real(lo) << ", " << format_real(hi) << "]</text>\n";
  out << "</svg>\n";
}

}  // namespace lbr

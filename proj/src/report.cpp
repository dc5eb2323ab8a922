#include "mdstyle/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace mdstyle {

namespace {

std::string num(double v, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

constexpr const char* kCurveHeader = "scheme,domain,s,seed,accuracy";

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

std::vector<std::string> fields_of(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

class Canvas {
public:
    Canvas(std::size_t rows, std::size_t cols, float bg) : rows_(rows), cols_(cols), px_(rows * cols, bg) {}

    void dot(long r, long c, float v, int half = 1) {
        for (long dr = -half; dr <= half; ++dr)
            for (long dc = -half; dc <= half; ++dc) put(r + dr, c + dc, v);
    }
    void line(double r0, double c0, double r1, double c1, float v) {
        const int steps = static_cast<int>(std::max(std::abs(r1 - r0), std::abs(c1 - c0))) + 1;
        for (int i = 0; i <= steps; ++i) {
            const double t = static_cast<double>(i) / steps;
            put(std::lround(r0 + t * (r1 - r0)), std::lround(c0 + t * (c1 - c0)), v);
        }
    }
    void put(long r, long c, float v) {
        if (r < 0 || c < 0 || r >= static_cast<long>(rows_) || c >= static_cast<long>(cols_)) return;
        px_[static_cast<std::size_t>(r) * cols_ + static_cast<std::size_t>(c)] = v;
    }
    ImageGrid image() && { return ImageGrid(rows_, cols_, std::move(px_)); }

private:
    std::size_t rows_, cols_;
    std::vector<float> px_;
};

float domain_gray(Domain d) {
    switch (d) {
        case Domain::measured: return 1.0f;
        case Domain::clean: return 0.25f;
        case Domain::awgn: return 0.45f;
        case Domain::patch: return 0.6f;
        case Domain::styled: return 0.8f;
    }
    return 0.5f;
}

}  // namespace

std::string confusion_csv(const ConfusionMatrix& m) {
    std::string out;
    for (const auto& row : m.percent()) {
        for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + num(row[c], 4);
        out += '\n';
    }
    return out;
}

std::string curves_csv(const std::vector<CaseReport>& reports) {
    std::string out = std::string(kCurveHeader) + "\n";
    for (const auto& r : reports)
        out += std::string(scheme_name(r.scheme)) + "," + std::string(domain_name(r.domain)) + "," + num(r.s, 0) + "," +
               std::to_string(r.seed_index) + "," + num(r.eval.accuracy, 4) + "\n";
    return out;
}

std::string training_curves_csv(const std::vector<CaseReport>& reports) {
    std::string out = "scheme,domain,s,seed,epoch,loss\n";
    for (const auto& r : reports)
        for (std::size_t e = 0; e < r.loss_history.size(); ++e)
            out += std::string(scheme_name(r.scheme)) + "," + std::string(domain_name(r.domain)) + "," + num(r.s, 0) +
                   "," + std::to_string(r.seed_index) + "," + std::to_string(e) + "," + num(r.loss_history[e], 8) +
                   "\n";
    return out;
}

std::string distance_table_csv(const DistanceTable& t) {
    std::string out = "activity";
    for (Domain d : kTableDomains) out += "," + std::string(domain_name(d));
    out += '\n';
    for (int a = 1; a <= kNumActivities; ++a) {
        out += std::to_string(a);
        for (double v : t.rows[static_cast<std::size_t>(a - 1)]) out += "," + num(v, 4);
        out += '\n';
    }
    out += "mean";
    for (double v : t.mean) out += "," + num(v, 4);
    return out + "\n";
}

std::string embeddings_csv(const std::vector<EmbeddedImage>& e) {
    std::string out = "id,activity,domain";
    for (std::size_t k = 0; k < kEmbeddingSize; ++k) out += ",e" + std::to_string(k);
    out += '\n';
    for (std::size_t i = 0; i < e.size(); ++i) {
        out += std::to_string(i) + "," + std::to_string(e[i].activity_id) + "," + std::string(domain_name(e[i].domain));
        for (double v : e[i].embedding) out += "," + num(v, 8);
        out += '\n';
    }
    return out;
}

std::string cloud_csv(const EmbeddingCloud& c) {
    std::string out = "id,activity,domain,x,y\n";
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        const auto& p = c.points[i];
        out += std::to_string(i) + "," + std::to_string(p.activity_id) + "," + std::string(domain_name(p.domain)) +
               "," + num(p.xy[0], 6) + "," + num(p.xy[1], 6) + "\n";
    }
    return out;
}

std::string merge_curve_csvs(const std::vector<std::string>& csvs) {
    std::vector<std::string> rows;
    for (const auto& csv : csvs) {
        const auto lines = lines_of(csv);
        if (lines.empty()) continue;
        if (lines.front() != kCurveHeader) throw InvalidArgument("not a curves CSV: header '" + lines.front() + "'");
        rows.insert(rows.end(), lines.begin() + 1, lines.end());
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    std::string out = std::string(kCurveHeader) + "\n";
    for (const auto& r : rows) out += r + "\n";
    return out;
}

std::vector<CurvePoint> parse_curves_csv(const std::string& csv) {
    const auto lines = lines_of(csv);
    if (lines.empty() || lines.front() != kCurveHeader) throw InvalidArgument("not a curves CSV");
    std::vector<CurvePoint> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = fields_of(lines[i]);
        if (f.size() != 5) throw InvalidArgument("curves CSV row " + std::to_string(i) + " has wrong field count");
        const auto d = parse_domain(f[1]);
        if (!d) throw InvalidArgument("unknown domain '" + f[1] + "'");
        out.push_back({parse_scheme(f[0]), *d, std::stod(f[2]), std::stoi(f[3]), std::stod(f[4])});
    }
    return out;
}

double mean_accuracy(const std::vector<CurvePoint>& pts, Scheme scheme, Domain domain, double s) {
    double sum = 0.0;
    int n = 0;
    for (const auto& p : pts)
        if (p.scheme == scheme && p.domain == domain && std::abs(p.s - s) < 1e-9) {
            sum += p.accuracy;
            ++n;
        }
    return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / n;
}

ImageGrid scatter_raster(const EmbeddingCloud& c, int activity_id, std::size_t size) {
    Canvas canvas(size, size, 0.0f);
    double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x, lo_y = lo_x, hi_y = -lo_x;
    for (const auto& p : c.points) {
        if (p.activity_id != activity_id) continue;
        lo_x = std::min(lo_x, p.xy[0]);
        hi_x = std::max(hi_x, p.xy[0]);
        lo_y = std::min(lo_y, p.xy[1]);
        hi_y = std::max(hi_y, p.xy[1]);
    }
    if (!std::isfinite(lo_x)) return std::move(canvas).image();
    const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
    const double usable = static_cast<double>(size) - 9.0;
    // Measured last so it stays visible on top.
    for (Domain d : {Domain::clean, Domain::awgn, Domain::patch, Domain::styled, Domain::measured})
        for (const auto& p : c.points) {
            if (p.activity_id != activity_id || p.domain != d) continue;
            const long col = 4 + std::lround((p.xy[0] - lo_x) / span * usable);
            const long row = 4 + std::lround((hi_y - p.xy[1]) / span * usable);
            canvas.dot(row, col, domain_gray(d));
        }
    return std::move(canvas).image();
}

ImageGrid curves_raster(const std::vector<CurvePoint>& pts, std::size_t panel) {
    const std::array<Scheme, 2> schemes = {Scheme::replacement, Scheme::augmentation};
    Canvas canvas(panel, 2 * panel + 10, 0.0f);
    const double margin = 10.0;
    const double w = static_cast<double>(panel) - 2 * margin;
    for (std::size_t k = 0; k < schemes.size(); ++k) {
        const double x0 = static_cast<double>(k * (panel + 10)) + margin;
        canvas.line(margin, x0, margin + w, x0, 0.1f);
        canvas.line(margin + w, x0, margin + w, x0 + w, 0.1f);
        for (Domain d : {Domain::clean, Domain::awgn, Domain::patch, Domain::styled}) {
            std::vector<double> ss;
            for (const auto& p : pts)
                if (p.scheme == schemes[k] && p.domain == d) ss.push_back(p.s);
            std::sort(ss.begin(), ss.end());
            ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
            double pr = 0.0, pc = 0.0;
            for (std::size_t i = 0; i < ss.size(); ++i) {
                const double acc = mean_accuracy(pts, schemes[k], d, ss[i]);
                const double r = margin + (1.0 - acc / 100.0) * w;
                const double c = x0 + ss[i] / 100.0 * w;
                if (i > 0) canvas.line(pr, pc, r, c, domain_gray(d));
                canvas.dot(std::lround(r), std::lround(c), domain_gray(d));
                pr = r;
                pc = c;
            }
        }
    }
    return std::move(canvas).image();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot read " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_benchmark_reports(const std::vector<CaseReport>& reports, const std::filesystem::path& dir) {
    write_text(dir / "curves.csv", curves_csv(reports));
    write_text(dir / "training_curves.csv", training_curves_csv(reports));
    for (const auto& r : reports) {
        char name[128];
        std::snprintf(name, sizeof name, "confusion/case%d_%s_%s_s%03d_seed%d.csv", r.case_id,
                      std::string(scheme_name(r.scheme)).c_str(), std::string(domain_name(r.domain)).c_str(),
                      static_cast<int>(std::lround(r.s)), r.seed_index);
        write_text(dir / name, confusion_csv(r.eval.confusion));
    }
}

void write_realism_reports(const RealismReport& r, const std::filesystem::path& dir) {
    write_text(dir / "embeddings.csv", embeddings_csv(r.embeddings));
    write_text(dir / "cloud.csv", cloud_csv(r.cloud));
    write_text(dir / "distance_table.csv", distance_table_csv(r.table));
    std::filesystem::create_directories(dir / "scatter");
    for (int a = 1; a <= kNumActivities; ++a) {
        char name[32];
        std::snprintf(name, sizeof name, "activity%02d.pgm", a);
        write_pgm(scatter_raster(r.cloud, a), dir / "scatter" / name);
    }
}

}  // namespace mdstyle

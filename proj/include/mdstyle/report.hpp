#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mdstyle/benchmark.hpp"

namespace mdstyle {

/// 10 rows of 10 row-normalised percentages, no header.
std::string confusion_csv(const ConfusionMatrix& m);
/// scheme,domain,s,seed,accuracy
std::string curves_csv(const std::vector<CaseReport>& reports);
/// scheme,domain,s,seed,epoch,loss
std::string training_curves_csv(const std::vector<CaseReport>& reports);
/// activity,clean,styled,awgn,patch; ten activity rows then a mean row.
std::string distance_table_csv(const DistanceTable& t);
/// id,activity,domain,e0..e127
std::string embeddings_csv(const std::vector<EmbeddedImage>& e);
/// id,activity,domain,x,y
std::string cloud_csv(const EmbeddingCloud& c);

/// Concatenates curve CSVs, keeping one header; rows are sorted so the
/// result does not depend on input order. Throws on a header mismatch.
std::string merge_curve_csvs(const std::vector<std::string>& csvs);

struct CurvePoint {
    Scheme scheme;
    Domain domain;
    double s;
    int seed;
    double accuracy;
};
std::vector<CurvePoint> parse_curves_csv(const std::string& csv);

/// Mean accuracy over seeds for one scheme/domain/s; NaN if absent.
double mean_accuracy(const std::vector<CurvePoint>& pts, Scheme scheme, Domain domain, double s);

/// Scatter plot of one activity's cloud; domains drawn at distinct gray levels.
ImageGrid scatter_raster(const EmbeddingCloud& c, int activity_id, std::size_t size = 200);
/// Accuracy-vs-s line plot, one panel per scheme, one gray level per domain.
ImageGrid curves_raster(const std::vector<CurvePoint>& pts, std::size_t panel = 200);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Writes curves.csv, training_curves.csv and one confusion CSV per report into `dir`.
void write_benchmark_reports(const std::vector<CaseReport>& reports, const std::filesystem::path& dir);
/// Writes embeddings.csv, cloud.csv, distance_table.csv and per-activity scatter PGMs into `dir`.
void write_realism_reports(const RealismReport& r, const std::filesystem::path& dir);

}  // namespace mdstyle

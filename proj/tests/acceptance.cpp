// Acceptance suite: one pass/fail line per criterion.
//
// Criteria 1-7 exercise the library in-process against independent oracles;
// criteria 8-10 drive the CLI end to end on a synthetic clustered dataset
// and check retrieval quality, determinism, and the code-length trend.

#include "bsc/bbc.h"
#include "bsc/eval.h"
#include "bsc/hamming.h"
#include "bsc/ibc.h"
#include "bsc/io.h"
#include "bsc/rand.h"
#include "bsc/subspace.h"
#include "oracles.h"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;
using bsc::Matrix;
using bsc::Vector;

namespace {

struct Criterion {
    std::string name;
    std::function<void(std::vector<std::string>&)> body;
    double time_limit_s;  // 0 = no limit
};

void expect(std::vector<std::string>& failures, bool condition, const std::string& what) {
    if (!condition) failures.push_back(what);
}

fs::path g_workdir;

int run_cli(const std::string& args) {
    static int call = 0;
    fs::path log = g_workdir / ("cli_" + std::to_string(call++) + ".log");
    std::string cmd = std::string(BSC_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "<unreadable:" + path.string() + ">";
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

double report_value(const fs::path& report, const std::string& key) {
    std::ifstream in(report);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(key + "=", 0) == 0) return std::stod(line.substr(key.size() + 1));
    }
    return -1.0;
}

// ---------------------------------------------------------------------------

void criterion_distance_oracle(std::vector<std::string>& failures) {
    bsc::Rng rng(101);
    int checked = 0;
    while (checked < 200) {
        for (Eigen::Index d : {4, 8, 16}) {
            for (Eigen::Index rho = 1; rho < d && checked < 200; ++rho) {
                bsc::SubspaceEntry entry = oracle::random_subspace(rng, d, rho, "v");
                Vector q = rng.gaussian_matrix(d, 1).col(0) * (1.0 + 4.0 * rng.uniform());
                double via_trace = bsc::distance_sq(q, entry.projector);
                double via_lsq = oracle::least_squares_distance_sq(q, entry.basis);
                double tol = 1e-8 * (1.0 + q.squaredNorm());
                expect(failures, std::abs(via_trace - via_lsq) <= tol,
                       "pair " + std::to_string(checked) + ": |" + std::to_string(via_trace) +
                           " - " + std::to_string(via_lsq) + "| > tol");
                ++checked;
            }
        }
    }
}

void criterion_mips_equivalence(std::vector<std::string>& failures) {
    bsc::Rng rng(103);
    const Eigen::Index d = 8;
    std::vector<bsc::SubspaceEntry> database;
    for (int i = 0; i < 45; ++i) {
        char id[8];
        std::snprintf(id, sizeof(id), "v%03d", i);
        database.push_back(oracle::random_subspace(rng, d, 1 + i % (d - 1), id));
    }
    // Five duplicated projectors with fresh ids force exact score ties.
    for (int i = 0; i < 5; ++i) {
        bsc::SubspaceEntry dup = database[i * 7];
        char id[8];
        std::snprintf(id, sizeof(id), "t%03d", i);
        dup.video_id = id;
        database.push_back(dup);
    }

    for (int trial = 0; trial < 20; ++trial) {
        Vector q = rng.gaussian_matrix(d, 1).col(0);
        bsc::QueryLift lift = bsc::lift_query(q, "q");

        // Route 1: Tr(S~ q q^T) computed as a quadratic form.
        std::vector<double> scores(database.size());
        std::vector<std::string> ids(database.size());
        for (std::size_t i = 0; i < database.size(); ++i) {
            scores[i] = q.dot(database[i].projector * q);
            ids[i] = database[i].video_id;
        }
        std::vector<std::size_t> order(database.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (scores[a] != scores[b]) return scores[a] > scores[b];
            return ids[a] < ids[b];
        });

        // Route 2: <vec(S~), vec(qq^T)> via exact_search.
        bsc::RankedResult ranked = bsc::exact_search(lift, database, database.size());
        for (std::size_t i = 0; i < database.size(); ++i) {
            expect(failures, ranked[i].video_id == ids[order[i]],
                   "trial " + std::to_string(trial) + " rank " + std::to_string(i) + ": " +
                       ranked[i].video_id + " vs " + ids[order[i]]);
        }
    }
}

void criterion_ibc_substeps(std::vector<std::string>& failures) {
    bsc::Rng rng(107);
    for (int trial = 0; trial < 50; ++trial) {
        int r = 1 + static_cast<int>(rng.uniform() * 4);
        int max_n = 12 / r;
        int n = 1 + static_cast<int>(rng.uniform() * max_n);
        int k = 1 + static_cast<int>(rng.uniform() * 4);
        int d2 = 2 + static_cast<int>(rng.uniform() * 4);
        double lambda = 0.05 + 2.0 * rng.uniform();

        Matrix opposite = bsc::sign_of(rng.gaussian_matrix(r, k));
        Matrix corr = rng.gaussian_matrix(n, k);
        Matrix proj = rng.gaussian_matrix(d2, r);
        Matrix data = rng.gaussian_matrix(d2, n);

        Matrix returned = bsc::update_codes(opposite, corr, proj, data, lambda);
        auto value_of = [&](const Matrix& codes) {
            return (codes * corr * opposite.transpose()).trace() -
                   lambda * (codes - proj.transpose() * data).squaredNorm();
        };
        double best = -1e300;
        Matrix best_codes;
        oracle::for_each_sign_matrix(r, n, [&](const Matrix& candidate) {
            double value = value_of(candidate);
            if (value > best) {
                best = value;
                best_codes = candidate;
            }
        });
        expect(failures, value_of(returned) == best,
               "update_codes not optimal on trial " + std::to_string(trial));
        expect(failures, (returned - best_codes).norm() == 0.0,
               "update_codes argmax mismatch on trial " + std::to_string(trial));
    }

    for (int trial = 0; trial < 20; ++trial) {
        int d2 = 4 + static_cast<int>(rng.uniform() * 5);
        int n = d2 + 2 + static_cast<int>(rng.uniform() * 6);
        int r = 1 + static_cast<int>(rng.uniform() * 4);
        Matrix data = rng.gaussian_matrix(d2, n);
        Matrix codes = bsc::sign_of(rng.gaussian_matrix(r, n));
        Matrix proj = bsc::solve_projection(data, codes);
        double residual = (data * data.transpose() * proj - data * codes.transpose()).norm();
        expect(failures, residual <= 1e-8 * (1.0 + data.norm() * codes.norm()),
               "normal-equation residual " + std::to_string(residual) + " on trial " +
                   std::to_string(trial));
    }
}

void criterion_bbc_monotone(std::vector<std::string>& failures) {
    bsc::Rng rng(109);
    const int d = 16, k = 40, n = 80, clusters = 5;
    std::vector<Matrix> bases;
    for (int c = 0; c < clusters; ++c) bases.push_back(bsc::random_orthonormal(d, 3, rng));

    std::vector<bsc::SubspaceEntry> subspaces;
    for (int j = 0; j < k; ++j) {
        const Matrix& basis = bases[j % clusters];
        subspaces.push_back({"v" + std::to_string(j), basis, basis * basis.transpose()});
    }
    std::vector<Vector> images;
    Eigen::MatrixXi delta(n, k);
    for (int i = 0; i < n; ++i) {
        images.push_back(bases[i % clusters] * rng.gaussian_matrix(3, 1).col(0) +
                         0.05 * rng.gaussian_matrix(d, 1).col(0));
        for (int j = 0; j < k; ++j) delta(i, j) = (i % clusters == j % clusters) ? 1 : 0;
    }
    bsc::BbcTrainingSet train = bsc::make_bbc_training(subspaces, images, delta);

    bsc::BbcTrainOptions opts;
    opts.c1 = 4;
    opts.c2 = 4;
    opts.mu = 1.0;
    opts.iters = 10;
    opts.seed = 2024;
    bsc::BbcTrainResult result = bsc::train_bbc(train, opts);

    expect(failures, result.objective_trace.size() >= 61u,
           "expected a full 10-sweep trace, got " +
               std::to_string(result.objective_trace.size()));
    for (std::size_t i = 0; i + 1 < result.objective_trace.size(); ++i) {
        expect(failures, result.objective_trace[i + 1] >= result.objective_trace[i] - 1e-9,
               "objective decreased at block " + std::to_string(i) + ": " +
                   std::to_string(result.objective_trace[i]) + " -> " +
                   std::to_string(result.objective_trace[i + 1]));
    }
    for (std::size_t s = 0; s < result.orthonormality_residuals.size(); ++s) {
        expect(failures, result.orthonormality_residuals[s] <= 1e-8,
               "rotation constraint residual " +
                   std::to_string(result.orthonormality_residuals[s]) + " after sweep " +
                   std::to_string(s + 1));
    }
}

void criterion_polar_optimality(std::vector<std::string>& failures) {
    bsc::Rng rng(113);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::Index d = 6 + static_cast<Eigen::Index>(rng.uniform() * 11);
        Eigen::Index c = 2 + static_cast<Eigen::Index>(rng.uniform() * 5);
        Matrix d_mat = rng.gaussian_matrix(c, d);
        Matrix best = bsc::polar_max_trace(d_mat);
        double value = (d_mat * best).trace();
        for (int probe = 0; probe < 100; ++probe) {
            Matrix p = bsc::random_orthonormal(d, c, rng);
            expect(failures, value >= (d_mat * p).trace(),
                   "probe beat the polar step on trial " + std::to_string(trial));
        }
    }
}

void criterion_kronecker(std::vector<std::string>& failures) {
    bsc::Rng rng(127);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.uniform() * 7);
        Eigen::Index c1 = 1 + static_cast<Eigen::Index>(rng.uniform() * d);
        Eigen::Index c2 = 1 + static_cast<Eigen::Index>(rng.uniform() * d);
        Matrix r1 = bsc::random_orthonormal(d, c1, rng);
        Matrix r2 = bsc::random_orthonormal(d, c2, rng);
        Matrix x = rng.gaussian_matrix(d, d);

        Matrix rotated = r1.transpose() * x * r2;
        Eigen::Map<const Vector> vec_rotated(rotated.data(), rotated.size());
        Eigen::Map<const Vector> vec_x(x.data(), x.size());
        Vector via_kron = oracle::kron(r2, r1).transpose() * vec_x;
        double err = (vec_rotated - via_kron).lpNorm<Eigen::Infinity>();
        expect(failures, err <= 1e-10,
               "trial " + std::to_string(trial) + ": deviation " + std::to_string(err));
    }
}

void criterion_hamming_identity(std::vector<std::string>& failures) {
    for (int r = 1; r <= 12; ++r) {
        std::vector<bsc::PackedCode> packed;
        packed.reserve(std::size_t{1} << r);
        for (std::uint32_t mask = 0; mask < (1u << r); ++mask) {
            bsc::SignCode code(r);
            for (int b = 0; b < r; ++b) code[b] = (mask >> b) & 1 ? 1 : -1;
            packed.push_back(bsc::pack(code));
        }
        long long mismatches = 0;
        for (std::size_t a = 0; a < packed.size(); ++a) {
            for (std::size_t b = 0; b < packed.size(); ++b) {
                if (bsc::inner_product(packed[a], packed[b]) !=
                    r - 2 * bsc::hamming(packed[a], packed[b])) {
                    ++mismatches;
                }
            }
        }
        expect(failures, mismatches == 0,
               "r=" + std::to_string(r) + ": " + std::to_string(mismatches) + " mismatches");
    }

    bsc::Rng rng(131);
    for (int r : {64, 128}) {
        for (int trial = 0; trial < 10000; ++trial) {
            bsc::SignCode a(r), b(r);
            int dense = 0;
            for (int i = 0; i < r; ++i) {
                a[i] = rng.uniform() < 0.5 ? -1 : 1;
                b[i] = rng.uniform() < 0.5 ? -1 : 1;
                dense += a[i] * b[i];
            }
            if (bsc::inner_product(bsc::pack(a), bsc::pack(b)) != dense) {
                failures.push_back("dense mismatch at r=" + std::to_string(r) + " trial " +
                                   std::to_string(trial));
                return;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Criteria 8-10 share one CLI pipeline.

struct PipelineFiles {
    fs::path dir;
    fs::path manifest, subspaces, queries;
    fs::path ibc_model, ibc_index, bbc_model, bbc_index;
    fs::path run_exact, run_ibc, run_bbc;
    fs::path report_exact, report_ibc, report_bbc;
};

// synth -> build -> exact/IBC/BBC query -> eval, all through the CLI.
bool run_pipeline(const fs::path& dir, std::vector<std::string>& failures, PipelineFiles& out) {
    fs::create_directories(dir);
    out.dir = dir;
    out.manifest = dir / "ds/manifest.txt";
    out.subspaces = dir / "subs.bscs";
    out.queries = dir / "queries.txt";
    out.ibc_model = dir / "ibc64.bsch";
    out.ibc_index = dir / "ibc64.bsci";
    out.bbc_model = dir / "bbc64.bsch";
    out.bbc_index = dir / "bbc64.bsci";
    out.run_exact = dir / "run_exact.txt";
    out.run_ibc = dir / "run_ibc.txt";
    out.run_bbc = dir / "run_bbc.txt";
    out.report_exact = dir / "report_exact.txt";
    out.report_ibc = dir / "report_ibc.txt";
    out.report_bbc = dir / "report_bbc.txt";

    auto step = [&](const std::string& args) {
        int code = run_cli(args);
        if (code != 0) failures.push_back("CLI step failed (" + std::to_string(code) + "): " + args);
        return code == 0;
    };

    if (!step("synth --out " + (dir / "ds").string() +
              " --clusters 10 --videos-per-cluster 20 --frames-per-video 30"
              " --dim 32 --subspace-dim 4 --noise 0.05 --seed 9001")) {
        return false;
    }
    if (!step("build --manifest " + out.manifest.string() + " --out " + out.subspaces.string() +
              " --max-rank 4")) {
        return false;
    }

    // 50 queries: every 4th image, 5 per cluster.
    {
        bsc::io::Manifest manifest = bsc::io::read_manifest(out.manifest);
        std::ofstream ids(out.queries);
        for (std::size_t i = 0; i < manifest.images.size(); i += 4) {
            ids << manifest.images[i].id << "\n";
        }
    }

    bool ok = true;
    ok &= step("query --exact --subspaces " + out.subspaces.string() + " --manifest " +
               out.manifest.string() + " --queries " + out.queries.string() +
               " --k 200 --out " + out.run_exact.string());
    ok &= step("eval --run " + out.run_exact.string() + " --manifest " + out.manifest.string() +
               " --k 10 --out " + out.report_exact.string());

    ok &= step("train-ibc --manifest " + out.manifest.string() + " --subspaces " +
               out.subspaces.string() + " --bits 64 --lambda 1 --topm 20 --iters 2 --seed 42"
               " --out " + out.ibc_model.string());
    ok &= step("encode --model " + out.ibc_model.string() + " --subspaces " +
               out.subspaces.string() + " --out " + out.ibc_index.string());
    ok &= step("query --model " + out.ibc_model.string() + " --index " + out.ibc_index.string() +
               " --manifest " + out.manifest.string() + " --queries " + out.queries.string() +
               " --k 200 --out " + out.run_ibc.string());
    ok &= step("eval --run " + out.run_ibc.string() + " --manifest " + out.manifest.string() +
               " --k 10 --out " + out.report_ibc.string());

    ok &= step("train-bbc --manifest " + out.manifest.string() + " --subspaces " +
               out.subspaces.string() + " --c1 32 --c2 2 --mu 0.0625 --iters 10 --seed 7"
               " --out " + out.bbc_model.string());
    ok &= step("encode --model " + out.bbc_model.string() + " --subspaces " +
               out.subspaces.string() + " --out " + out.bbc_index.string());
    ok &= step("query --model " + out.bbc_model.string() + " --index " + out.bbc_index.string() +
               " --manifest " + out.manifest.string() + " --queries " + out.queries.string() +
               " --k 200 --out " + out.run_bbc.string());
    ok &= step("eval --run " + out.run_bbc.string() + " --manifest " + out.manifest.string() +
               " --k 10 --out " + out.report_bbc.string());
    return ok;
}

double random_ranking_map(const fs::path& manifest_path, const fs::path& queries_path) {
    bsc::io::Manifest manifest = bsc::io::read_manifest(manifest_path);
    std::vector<std::string> video_ids;
    for (const auto& video : manifest.videos) video_ids.push_back(video.id);

    bsc::Rng rng(555);
    bsc::Run run;
    std::ifstream ids(queries_path);
    std::string query_id;
    while (ids >> query_id) {
        std::vector<std::string> shuffled = video_ids;
        for (std::size_t i = shuffled.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(rng.uniform() * i);
            std::swap(shuffled[i - 1], shuffled[j]);
        }
        run[query_id] = std::move(shuffled);
    }
    return bsc::evaluate(run, manifest.ground_truth(), 10).map;
}

PipelineFiles g_pipeline;  // produced by criterion 8, reused by 9

void criterion_benchmark(std::vector<std::string>& failures) {
    if (!run_pipeline(g_workdir / "run_a", failures, g_pipeline)) return;

    double map_exact = report_value(g_pipeline.report_exact, "map");
    double map_ibc = report_value(g_pipeline.report_ibc, "map");
    double map_bbc = report_value(g_pipeline.report_bbc, "map");
    double map_random = random_ranking_map(g_pipeline.manifest, g_pipeline.queries);

    std::printf("    exact: mAP %.4f  P@10 %.4f\n", map_exact,
                report_value(g_pipeline.report_exact, "precision_at_k"));
    std::printf("    ibc64: mAP %.4f  P@10 %.4f\n", map_ibc,
                report_value(g_pipeline.report_ibc, "precision_at_k"));
    std::printf("    bbc64: mAP %.4f  P@10 %.4f\n", map_bbc,
                report_value(g_pipeline.report_bbc, "precision_at_k"));
    std::printf("    random ranking: mAP %.4f\n", map_random);

    expect(failures, map_exact >= 0.95,
           "exact mAP " + std::to_string(map_exact) + " < 0.95");
    expect(failures, map_ibc >= 0.60, "IBC mAP " + std::to_string(map_ibc) + " < 0.60");
    expect(failures, map_bbc >= 0.60, "BBC mAP " + std::to_string(map_bbc) + " < 0.60");
    expect(failures, map_ibc >= 1.5 * map_random, "IBC mAP below 1.5x random");
    expect(failures, map_bbc >= 1.5 * map_random, "BBC mAP below 1.5x random");
}

void criterion_determinism(std::vector<std::string>& failures) {
    if (g_pipeline.dir.empty()) {
        failures.push_back("criterion 8 pipeline unavailable");
        return;
    }
    PipelineFiles second;
    if (!run_pipeline(g_workdir / "run_b", failures, second)) return;

    auto same = [&](const fs::path& a, const fs::path& b, const std::string& what) {
        expect(failures, slurp(a) == slurp(b), what + " differs between identical runs");
    };
    same(g_pipeline.ibc_model, second.ibc_model, "IBC model file");
    same(g_pipeline.bbc_model, second.bbc_model, "BBC model file");
    same(g_pipeline.ibc_index, second.ibc_index, "IBC index file");
    same(g_pipeline.bbc_index, second.bbc_index, "BBC index file");
    same(g_pipeline.report_exact, second.report_exact, "exact metric report");
    same(g_pipeline.report_ibc, second.report_ibc, "IBC metric report");
    same(g_pipeline.report_bbc, second.report_bbc, "BBC metric report");
}

void criterion_code_length_sweep(std::vector<std::string>& failures) {
    if (g_pipeline.dir.empty() || !fs::exists(g_pipeline.subspaces)) {
        failures.push_back("criterion 8 pipeline unavailable");
        return;
    }
    const fs::path dir = g_workdir / "sweep";
    fs::create_directories(dir);
    const std::string common = " --manifest " + g_pipeline.manifest.string() + " --subspaces " +
                               g_pipeline.subspaces.string();

    auto evaluate_model = [&](const std::string& tag, const std::string& train_args) {
        fs::path model = dir / (tag + ".bsch");
        fs::path index = dir / (tag + ".bsci");
        fs::path run = dir / (tag + "_run.txt");
        fs::path report = dir / (tag + "_report.txt");
        bool ok = run_cli(train_args + " --out " + model.string()) == 0;
        ok = ok && run_cli("encode --model " + model.string() + " --subspaces " +
                           g_pipeline.subspaces.string() + " --out " + index.string()) == 0;
        ok = ok && run_cli("query --model " + model.string() + " --index " + index.string() +
                           " --manifest " + g_pipeline.manifest.string() + " --queries " +
                           g_pipeline.queries.string() + " --k 200 --out " + run.string()) == 0;
        ok = ok && run_cli("eval --run " + run.string() + " --manifest " +
                           g_pipeline.manifest.string() + " --k 10 --out " +
                           report.string()) == 0;
        if (!ok) {
            failures.push_back("sweep pipeline failed for " + tag);
            return -1.0;
        }
        return report_value(report, "map");
    };

    const int bit_lengths[] = {16, 32, 64, 96, 128};
    std::vector<double> ibc_maps;
    for (int bits : bit_lengths) {
        ibc_maps.push_back(evaluate_model(
            "ibc" + std::to_string(bits),
            "train-ibc" + common + " --bits " + std::to_string(bits) +
                " --lambda 1 --topm 20 --iters 2 --seed 42"));
    }
    const std::pair<int, int> factors[] = {{16, 1}, {16, 2}, {32, 2}, {32, 3}, {32, 4}};
    std::vector<double> bbc_maps;
    for (auto [c1, c2] : factors) {
        bbc_maps.push_back(evaluate_model(
            "bbc" + std::to_string(c1 * c2),
            "train-bbc" + common + " --c1 " + std::to_string(c1) + " --c2 " +
                std::to_string(c2) + " --mu 0.0625 --iters 10 --seed 7"));
    }

    std::printf("    bits :");
    for (int bits : bit_lengths) std::printf(" %8d", bits);
    std::printf("\n    IBC  :");
    for (double v : ibc_maps) std::printf(" %8.4f", v);
    std::printf("\n    BBC  :");
    for (double v : bbc_maps) std::printf(" %8.4f", v);
    std::printf("\n");

    for (double v : ibc_maps) expect(failures, v >= 0.0, "missing IBC sweep value");
    for (double v : bbc_maps) expect(failures, v >= 0.0, "missing BBC sweep value");
    expect(failures, ibc_maps.back() >= ibc_maps.front() - 0.02,
           "IBC mAP(128) " + std::to_string(ibc_maps.back()) + " < mAP(16) - 0.02");
    expect(failures, bbc_maps.back() >= bbc_maps.front() - 0.02,
           "BBC mAP(128) " + std::to_string(bbc_maps.back()) + " < mAP(16) - 0.02");
}

}  // namespace

int main() {
    g_workdir = fs::temp_directory_path() / ("bsc_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(g_workdir);
    fs::create_directories(g_workdir);

    const std::vector<Criterion> criteria = {
        {"distance-oracle equivalence (200 random pairs, d in {4,8,16})",
         criterion_distance_oracle, 5.0},
        {"MIPS reformulation matches trace ranking, ties included",
         criterion_mips_equivalence, 5.0},
        {"IBC sub-steps: exhaustive code argmax + normal-equation residual",
         criterion_ibc_substeps, 30.0},
        {"BBC block coordinate ascent is monotone with orthonormal rotations",
         criterion_bbc_monotone, 60.0},
        {"polar steps dominate random orthonormal probes",
         criterion_polar_optimality, 0.0},
        {"bilinear rotation equals the Kronecker-structured rotation",
         criterion_kronecker, 0.0},
        {"binary inner product identity, exhaustive to r=12",
         criterion_hamming_identity, 0.0},
        {"desk-scale retrieval benchmark (exact / IBC / BBC at 64 bits)",
         criterion_benchmark, 120.0},
        {"fixed seeds reproduce model, index, and report files byte-for-byte",
         criterion_determinism, 0.0},
        {"code-length sweep 16..128: mAP(128) >= mAP(16) - 0.02",
         criterion_code_length_sweep, 0.0},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::vector<std::string> failures;
        auto start = std::chrono::steady_clock::now();
        try {
            criteria[i].body(failures);
        } catch (const std::exception& e) {
            failures.push_back(std::string("exception: ") + e.what());
        }
        double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                             .count();
        if (criteria[i].time_limit_s > 0.0 && elapsed > criteria[i].time_limit_s) {
            failures.push_back("runtime " + std::to_string(elapsed) + " s exceeds limit of " +
                               std::to_string(criteria[i].time_limit_s) + " s");
        }
        bool pass = failures.empty();
        failed += pass ? 0 : 1;
        std::printf("[%s] %2zu. %s (%.2f s)\n", pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].name.c_str(), elapsed);
        for (std::size_t f = 0; f < failures.size() && f < 8; ++f) {
            std::printf("       - %s\n", failures[f].c_str());
        }
        if (failures.size() > 8) {
            std::printf("       - ... and %zu more\n", failures.size() - 8);
        }
    }

    if (failed == 0) fs::remove_all(g_workdir);
    else std::printf("artifacts kept under %s\n", g_workdir.string().c_str());
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
                criteria.size());
    return failed == 0 ? 0 : 1;
}

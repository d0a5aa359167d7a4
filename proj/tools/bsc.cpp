// Command-line surface for the binary subspace coding toolkit:
// synth | build | train-ibc | train-bbc | encode | query | eval.
// Exit codes: 0 success, 1 usage error, 2 data/format error, 3 numerical failure.

#include "bsc/bbc.h"
#include "bsc/eval.h"
#include "bsc/hamming.h"
#include "bsc/ibc.h"
#include "bsc/io.h"
#include "bsc/subspace.h"
#include "bsc/synth.h"
#include "bsc/types.h"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

namespace fs = std::filesystem;

namespace {

struct NamedImage {
    std::string id;
    bsc::Vector vec;
};

bsc::Vector load_image_vector(const fs::path& path) {
    bsc::Matrix m = bsc::io::read_matrix(path);
    if (m.cols() != 1) {
        throw bsc::data_error("image file must be a single-column matrix: " + path.string());
    }
    return m.col(0);
}

std::vector<NamedImage> load_manifest_images(const bsc::io::Manifest& manifest) {
    std::vector<NamedImage> images;
    images.reserve(manifest.images.size());
    for (const auto& entry : manifest.images) {
        images.push_back({entry.id, load_image_vector(manifest.resolve(entry.path))});
    }
    return images;
}

void require_dim(Eigen::Index actual, Eigen::Index expected, const std::string& what) {
    if (actual != expected) {
        throw bsc::data_error(what + ": dimension " + std::to_string(actual) +
                              " does not match expected " + std::to_string(expected));
    }
}

struct SynthArgs {
    std::string out;
    bsc::SynthParams params;
};

void run_synth(const SynthArgs& args) {
    bsc::io::Manifest manifest = bsc::synthesize(args.params, args.out);
    std::cout << "wrote " << manifest.videos.size() << " videos and " << manifest.images.size()
              << " images under " << args.out << "\n";
}

struct BuildArgs {
    std::string manifest_path;
    std::string out;
    double rel_tol = 1e-6;
    int max_rank = 0;
    bool serial = false;
};

void run_build(const BuildArgs& args) {
    bsc::io::Manifest manifest = bsc::io::read_manifest(args.manifest_path);
    if (manifest.videos.empty()) {
        throw bsc::data_error("manifest lists no videos: " + args.manifest_path);
    }

    const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(manifest.videos.size());
    std::vector<bsc::SubspaceEntry> entries(manifest.videos.size());
    std::exception_ptr first_error;

#pragma omp parallel for schedule(dynamic) if (!args.serial)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            const auto& video = manifest.videos[i];
            bsc::FrameMatrix frames{video.id,
                                    bsc::io::read_matrix(manifest.resolve(video.path))};
            entries[i] = bsc::make_subspace(frames, args.rel_tol, args.max_rank);
        } catch (...) {
#pragma omp critical
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);

    bsc::io::write_subspaces(args.out, entries);
    std::cout << "built " << entries.size() << " subspace entries -> " << args.out << "\n";
}

struct TrainIbcArgs {
    std::string manifest_path;
    std::string subspaces_path;
    std::string out;
    std::string amode = "topm";
    int top_m = 0;  // 0 = auto: max(1, n/10)
    bsc::IbcTrainOptions opts;
};

void run_train_ibc(const TrainIbcArgs& args) {
    bsc::io::Manifest manifest = bsc::io::read_manifest(args.manifest_path);
    std::vector<bsc::SubspaceEntry> subspaces = bsc::io::read_subspaces(args.subspaces_path);
    if (subspaces.empty()) throw bsc::data_error("no subspaces in " + args.subspaces_path);
    std::vector<NamedImage> named = load_manifest_images(manifest);
    if (named.empty()) throw bsc::data_error("manifest lists no images: " + args.manifest_path);

    const Eigen::Index d = subspaces.front().dim();
    std::vector<bsc::Vector> images;
    images.reserve(named.size());
    for (const NamedImage& img : named) {
        require_dim(img.vec.size(), d, "image " + img.id);
        images.push_back(img.vec);
    }

    bsc::IbcTrainingSet train = bsc::build_training(subspaces, images);
    if (args.amode == "raw") {
        train.A = bsc::correlation(train.U, train.V, bsc::CorrelationMode::Raw);
    } else if (args.amode == "topm") {
        int m = args.top_m > 0 ? args.top_m
                               : std::max(1, static_cast<int>(images.size()) / 10);
        train.A = bsc::correlation(train.U, train.V, bsc::CorrelationMode::TopM, m);
    } else {
        throw std::invalid_argument("--amode must be 'raw' or 'topm'");
    }

    bsc::IbcTrainResult result = bsc::train_ibc(train, args.opts);
    bsc::io::write_ibc_model(args.out, result.model);
    std::printf("trained IBC: bits=%d lambda=%g objective %.6g -> %.6g\n", args.opts.bits,
                args.opts.lambda, result.initial_objective, result.final_objective);
    std::printf("model -> %s\n", args.out.c_str());
}

struct TrainBbcArgs {
    std::string manifest_path;
    std::string subspaces_path;
    std::string out;
    std::string delta_mode = "category";
    bool serial = false;
    bsc::BbcTrainOptions opts;
};

void run_train_bbc(const TrainBbcArgs& args) {
    bsc::io::Manifest manifest = bsc::io::read_manifest(args.manifest_path);
    std::vector<bsc::SubspaceEntry> subspaces = bsc::io::read_subspaces(args.subspaces_path);
    if (subspaces.empty()) throw bsc::data_error("no subspaces in " + args.subspaces_path);
    std::vector<NamedImage> named = load_manifest_images(manifest);
    if (named.empty()) throw bsc::data_error("manifest lists no images: " + args.manifest_path);

    const Eigen::Index d = subspaces.front().dim();
    std::vector<bsc::Vector> images;
    images.reserve(named.size());
    for (const NamedImage& img : named) {
        require_dim(img.vec.size(), d, "image " + img.id);
        images.push_back(img.vec);
    }

    // delta_ij = 1 iff image i and video j share a category (or, with
    // --delta source, iff image i was sampled from video j).
    const Eigen::Index n = static_cast<Eigen::Index>(manifest.images.size());
    const Eigen::Index k = static_cast<Eigen::Index>(subspaces.size());
    std::map<std::string, const bsc::io::ManifestVideo*> video_records;
    for (const auto& v : manifest.videos) video_records[v.id] = &v;
    Eigen::MatrixXi delta(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& image = manifest.images[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < k; ++j) {
            const std::string& video_id = subspaces[static_cast<std::size_t>(j)].video_id;
            bool related = false;
            if (args.delta_mode == "category") {
                auto it = video_records.find(video_id);
                if (it == video_records.end()) {
                    throw bsc::data_error("subspace video '" + video_id +
                                          "' is missing from the manifest");
                }
                related = it->second->category == image.category;
            } else if (args.delta_mode == "source") {
                related = image.source_video == video_id;
            } else {
                throw std::invalid_argument("--delta must be 'category' or 'source'");
            }
            delta(i, j) = related ? 1 : 0;
        }
    }

    bsc::BbcTrainingSet train = bsc::make_bbc_training(subspaces, images, delta);
    bsc::BbcTrainOptions opts = args.opts;
    opts.exec = args.serial ? bsc::Execution::Serial : bsc::Execution::Parallel;
    bsc::BbcTrainResult result = bsc::train_bbc(train, opts);
    bsc::io::write_bbc_model(args.out, result.model);
    std::printf("trained BBC: c1=%d c2=%d mu=%g sweeps=%d%s objective %.6g -> %.6g\n", opts.c1,
                opts.c2, opts.mu, result.sweeps, result.converged ? " (converged)" : "",
                result.objective_trace.front(), result.objective_trace.back());
    std::printf("model -> %s\n", args.out.c_str());
}

struct EncodeArgs {
    std::string model_path;
    std::string subspaces_path;
    std::string out;
    bool serial = false;
};

void run_encode(const EncodeArgs& args) {
    std::vector<bsc::SubspaceEntry> subspaces = bsc::io::read_subspaces(args.subspaces_path);
    if (subspaces.empty()) throw bsc::data_error("no subspaces in " + args.subspaces_path);

    bsc::io::ModelKind kind = bsc::io::peek_model_kind(args.model_path);
    std::optional<bsc::IbcModel> ibc;
    std::optional<bsc::BbcModel> bbc;
    std::uint32_t nbits = 0;
    if (kind == bsc::io::ModelKind::Ibc) {
        ibc = bsc::io::read_ibc_model(args.model_path);
        require_dim(subspaces.front().dim() * subspaces.front().dim(), ibc->P.rows(),
                    "subspace file vs IBC model");
        nbits = static_cast<std::uint32_t>(ibc->bits());
    } else {
        bbc = bsc::io::read_bbc_model(args.model_path);
        require_dim(subspaces.front().dim(), bbc->d, "subspace file vs BBC model");
        nbits = static_cast<std::uint32_t>(bbc->bits());
    }

    const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(subspaces.size());
    std::vector<bsc::PackedCode> packed(subspaces.size());
    std::exception_ptr first_error;

#pragma omp parallel for schedule(static) if (!args.serial)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            bsc::SignCode code = ibc ? bsc::encode_video_ibc(*ibc, subspaces[i])
                                     : bsc::flatten_code(bsc::encode_video_bbc(*bbc, subspaces[i]));
            packed[i] = bsc::pack(code);
        } catch (...) {
#pragma omp critical
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);

    bsc::BinaryIndex index;
    index.nbits = nbits;
    for (std::size_t i = 0; i < subspaces.size(); ++i) {
        index.add(subspaces[i].video_id, std::move(packed[i]));
    }
    bsc::io::write_index(args.out, index);
    std::cout << "encoded " << index.size() << " videos at " << nbits << " bits -> " << args.out
              << "\n";
}

struct QueryArgs {
    bool exact = false;
    std::string subspaces_path;
    std::string model_path;
    std::string index_path;
    std::string manifest_path;
    std::string queries_path;
    std::string image_path;
    std::string out;
    std::size_t k = 10;
    bool serial = false;
};

void run_query(const QueryArgs& args) {
    const bsc::Execution exec = args.serial ? bsc::Execution::Serial : bsc::Execution::Parallel;

    // Resolve the query set.
    std::vector<NamedImage> queries;
    if (!args.image_path.empty()) {
        queries.push_back({fs::path(args.image_path).stem().string(),
                           load_image_vector(args.image_path)});
    } else {
        if (args.manifest_path.empty()) {
            throw std::invalid_argument("query: need --manifest (or --image FILE)");
        }
        bsc::io::Manifest manifest = bsc::io::read_manifest(args.manifest_path);
        std::vector<NamedImage> all = load_manifest_images(manifest);
        if (args.queries_path.empty()) {
            queries = std::move(all);
        } else {
            std::ifstream in(args.queries_path);
            if (!in) throw bsc::format_error("cannot open query list: " + args.queries_path);
            std::set<std::string> wanted;
            std::string id;
            while (in >> id) wanted.insert(id);
            for (NamedImage& img : all) {
                if (wanted.erase(img.id)) queries.push_back(std::move(img));
            }
            if (!wanted.empty()) {
                std::string message = "query ids not in manifest:";
                for (const std::string& missing : wanted) message += " " + missing;
                throw bsc::data_error(message);
            }
        }
    }
    if (queries.empty()) throw bsc::data_error("no queries to run");

    std::vector<bsc::io::RunEntry> entries;
    entries.reserve(queries.size());

    if (args.exact) {
        std::vector<bsc::SubspaceEntry> database = bsc::io::read_subspaces(args.subspaces_path);
        if (database.empty()) throw bsc::data_error("no subspaces in " + args.subspaces_path);
        const Eigen::Index d = database.front().dim();
        const std::size_t k = std::min(args.k, database.size());
        for (const NamedImage& query : queries) {
            require_dim(query.vec.size(), d, "query " + query.id);
            bsc::QueryLift lift = bsc::lift_query(query.vec, query.id);
            bsc::RankedResult ranked = bsc::exact_search(lift, database, k, exec);
            bsc::io::RunEntry entry{query.id, {}};
            for (const bsc::ScoredId& hit : ranked) entry.ranked.emplace_back(hit.video_id, hit.score);
            entries.push_back(std::move(entry));
        }
    } else {
        bsc::BinaryIndex index = bsc::io::read_index(args.index_path);
        if (index.size() == 0) throw bsc::data_error("empty index: " + args.index_path);
        const std::size_t k = std::min(args.k, index.size());

        bsc::io::ModelKind kind = bsc::io::peek_model_kind(args.model_path);
        std::optional<bsc::IbcModel> ibc;
        std::optional<bsc::BbcModel> bbc;
        if (kind == bsc::io::ModelKind::Ibc) {
            ibc = bsc::io::read_ibc_model(args.model_path);
            if (static_cast<std::uint32_t>(ibc->bits()) != index.nbits) {
                throw bsc::data_error("model bits do not match index bits");
            }
        } else {
            bbc = bsc::io::read_bbc_model(args.model_path);
            if (static_cast<std::uint32_t>(bbc->bits()) != index.nbits) {
                throw bsc::data_error("model bits do not match index bits");
            }
        }

        for (const NamedImage& query : queries) {
            bsc::SignCode code;
            if (ibc) {
                require_dim(query.vec.size() * query.vec.size(), ibc->Q.rows(),
                            "query " + query.id + " vs IBC model");
                code = bsc::encode_image_ibc(*ibc, query.vec);
            } else {
                require_dim(query.vec.size(), bbc->d, "query " + query.id + " vs BBC model");
                code = bsc::flatten_code(bsc::encode_image_bbc(*bbc, query.vec));
            }
            std::vector<bsc::HammingHit> hits = bsc::search(index, bsc::pack(code), k, exec);
            bsc::io::RunEntry entry{query.id, {}};
            for (const bsc::HammingHit& hit : hits) {
                entry.ranked.emplace_back(hit.video_id, static_cast<double>(hit.score));
            }
            entries.push_back(std::move(entry));
        }
    }

    if (args.out.empty()) {
        std::cout << "# query_id rank video_id score\n";
        for (const auto& entry : entries) {
            for (std::size_t rank = 0; rank < entry.ranked.size(); ++rank) {
                std::printf("%s %zu %s %.17g\n", entry.query_id.c_str(), rank + 1,
                            entry.ranked[rank].first.c_str(), entry.ranked[rank].second);
            }
        }
    } else {
        bsc::io::write_run(args.out, entries);
        std::cout << "ran " << entries.size() << " queries -> " << args.out << "\n";
    }
}

struct EvalArgs {
    std::string run_path;
    std::string manifest_path;
    std::string out;
    std::string table;
    std::size_t k = 10;
};

void run_eval(const EvalArgs& args) {
    std::vector<bsc::io::RunEntry> entries = bsc::io::read_run(args.run_path);
    if (entries.empty()) throw bsc::data_error("empty run file: " + args.run_path);
    bsc::io::Manifest manifest = bsc::io::read_manifest(args.manifest_path);

    bsc::MetricReport report =
        bsc::evaluate(bsc::io::to_run(entries), manifest.ground_truth(), args.k);
    std::cout << bsc::io::format_report(report);
    if (!args.out.empty()) bsc::io::write_report(args.out, report);
    if (!args.table.empty()) bsc::io::write_report_table(args.table, report);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"binary subspace coding: point-to-subspace video retrieval with asymmetric hashing"};
    app.require_subcommand(1);
    // Precedence: command-line flags > config file > built-in defaults.
    app.set_config("--config", "", "read options from an INI file (sections per subcommand)");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate a clustered synthetic dataset");
    synth->add_option("--out", synth_args.out, "output directory")->required();
    synth->add_option("--clusters", synth_args.params.clusters, "number of clusters");
    synth->add_option("--videos-per-cluster", synth_args.params.videos_per_cluster, "videos per cluster");
    synth->add_option("--frames-per-video", synth_args.params.frames_per_video, "frames per video");
    synth->add_option("--dim", synth_args.params.dim, "feature dimension d");
    synth->add_option("--subspace-dim", synth_args.params.subspace_dim, "cluster subspace dimension");
    synth->add_option("--noise", synth_args.params.noise, "per-coordinate Gaussian noise sigma");
    synth->add_option("--seed", synth_args.params.seed, "random seed");
    synth->callback([&] { run_synth(synth_args); });

    BuildArgs build_args;
    auto* build = app.add_subcommand("build", "build subspace entries from a manifest");
    build->add_option("--manifest", build_args.manifest_path, "dataset manifest")->required();
    build->add_option("--out", build_args.out, "output subspace file")->required();
    build->add_option("--rel-tol", build_args.rel_tol, "relative singular value cutoff");
    build->add_option("--max-rank", build_args.max_rank, "cap subspace rank (0 = no cap)");
    build->add_flag("--serial", build_args.serial, "disable the parallel build");
    build->callback([&] { run_build(build_args); });

    TrainIbcArgs ibc_args;
    auto* tibc = app.add_subcommand("train-ibc", "train inner-product binary coding");
    tibc->add_option("--manifest", ibc_args.manifest_path, "dataset manifest")->required();
    tibc->add_option("--subspaces", ibc_args.subspaces_path, "subspace file from 'build'")->required();
    tibc->add_option("--out", ibc_args.out, "output model file")->required();
    tibc->add_option("--bits", ibc_args.opts.bits, "code length r");
    tibc->add_option("--lambda", ibc_args.opts.lambda, "balance parameter");
    tibc->add_option("--iters", ibc_args.opts.outer_iters, "outer alternations");
    tibc->add_option("--inner-passes", ibc_args.opts.inner_passes, "code/projection passes per side");
    tibc->add_option("--seed", ibc_args.opts.seed, "random seed");
    tibc->add_option("--amode", ibc_args.amode, "correlation mode: topm|raw");
    tibc->add_option("--topm", ibc_args.top_m, "nonzeros per column for topm (0 = n/10)");
    tibc->callback([&] { run_train_ibc(ibc_args); });

    TrainBbcArgs bbc_args;
    auto* tbbc = app.add_subcommand("train-bbc", "train bilinear binary coding");
    tbbc->add_option("--manifest", bbc_args.manifest_path, "dataset manifest")->required();
    tbbc->add_option("--subspaces", bbc_args.subspaces_path, "subspace file from 'build'")->required();
    tbbc->add_option("--out", bbc_args.out, "output model file")->required();
    tbbc->add_option("--c1", bbc_args.opts.c1, "left code factor");
    tbbc->add_option("--c2", bbc_args.opts.c2, "right code factor");
    tbbc->add_option("--mu", bbc_args.opts.mu, "cross-term weight");
    tbbc->add_option("--iters", bbc_args.opts.iters, "sweep cap");
    tbbc->add_option("--seed", bbc_args.opts.seed, "random seed");
    tbbc->add_option("--delta", bbc_args.delta_mode, "pair signal: category|source");
    tbbc->add_flag("--serial", bbc_args.serial, "serial code sweeps");
    tbbc->callback([&] { run_train_bbc(bbc_args); });

    EncodeArgs encode_args;
    auto* encode = app.add_subcommand("encode", "hash all videos into a binary index");
    encode->add_option("--model", encode_args.model_path, "trained model file")->required();
    encode->add_option("--subspaces", encode_args.subspaces_path, "subspace file")->required();
    encode->add_option("--out", encode_args.out, "output index file")->required();
    encode->add_flag("--serial", encode_args.serial, "disable the parallel encoder");
    encode->callback([&] { run_encode(encode_args); });

    QueryArgs query_args;
    auto* query = app.add_subcommand("query", "rank videos for image queries");
    query->add_flag("--exact", query_args.exact, "exact inner-product scan over subspaces");
    query->add_option("--subspaces", query_args.subspaces_path, "subspace file (exact backend)");
    query->add_option("--model", query_args.model_path, "model file (hash backend)");
    query->add_option("--index", query_args.index_path, "index file (hash backend)");
    query->add_option("--manifest", query_args.manifest_path, "manifest providing query images");
    query->add_option("--queries", query_args.queries_path, "file of image ids, one per line");
    query->add_option("--image", query_args.image_path, "single query vector file");
    query->add_option("--k", query_args.k, "results per query");
    query->add_option("--out", query_args.out, "run output file (default: stdout)");
    query->add_flag("--serial", query_args.serial, "serial scan");
    query->callback([&] {
        if (query_args.exact == !query_args.model_path.empty()) {
            throw std::invalid_argument("query: choose exactly one of --exact or --model");
        }
        if (query_args.exact && query_args.subspaces_path.empty()) {
            throw std::invalid_argument("query: --exact requires --subspaces");
        }
        if (!query_args.exact && query_args.index_path.empty()) {
            throw std::invalid_argument("query: --model requires --index");
        }
        run_query(query_args);
    });

    EvalArgs eval_args;
    auto* eval = app.add_subcommand("eval", "score a run against manifest categories");
    eval->add_option("--run", eval_args.run_path, "run file from 'query'")->required();
    eval->add_option("--manifest", eval_args.manifest_path, "dataset manifest")->required();
    eval->add_option("--k", eval_args.k, "precision cutoff");
    eval->add_option("--out", eval_args.out, "report file");
    eval->add_option("--table", eval_args.table, "per-query AP table (TSV)");
    eval->callback([&] { run_eval(eval_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const bsc::numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const bsc::format_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const bsc::data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

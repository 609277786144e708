// Benchmark: OpenMP kernels against their serial reference
// implementations (disruption-index batch, k-means assignment). Verifies
// agreement before timing, prints a small table with speedups.

#include "synergylab/citation_graph.hpp"
#include "synergylab/disruption.hpp"
#include "synergylab/modes.hpp"
#include "synergylab/rng.hpp"
#include "synergylab/synthlab.hpp"

#include "CLI11.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>

using namespace synergylab;
using Clock = std::chrono::steady_clock;

namespace {

double time_once(const std::function<void()>& f) {
    auto t0 = Clock::now();
    f();
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double best_of(int reps, const std::function<void()>& f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) best = std::min(best, time_once(f));
    return best;
}

Corpus random_citation_corpus(uint32_t n_papers, uint64_t n_edges, uint64_t seed) {
    Rng rng(seed);
    Corpus c;
    c.author_ids.push_back("a0");
    c.authors.push_back({});
    c.node_ids.reserve(n_papers);
    for (uint32_t i = 0; i < n_papers; ++i) {
        c.node_ids.push_back("p" + std::to_string(i));
        PaperRecord rec;
        rec.year = 1960 + int32_t(rng.next_below(61));
        rec.author_begin = uint32_t(c.authorship_authors.size());
        c.authorship_authors.push_back(0);
        rec.author_end = uint32_t(c.authorship_authors.size());
        c.papers.push_back(rec);
    }
    c.n_papers = n_papers;
    c.citations.reserve(n_edges);
    for (uint64_t e = 0; e < n_edges; ++e) {
        PaperNode a = PaperNode(rng.next_below(n_papers));
        PaperNode b = PaperNode(rng.next_below(n_papers));
        if (a != b) c.citations.emplace_back(a, b);
    }
    std::sort(c.citations.begin(), c.citations.end());
    c.citations.erase(std::unique(c.citations.begin(), c.citations.end()), c.citations.end());
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"synergylab kernel benchmark: serial reference vs OpenMP"};
    uint32_t n_papers = 200000;
    uint64_t n_edges = 2000000;
    uint32_t km_rows = 200000;
    int km_dims = 22, km_k = 4;
    int reps = 3;
    app.add_option("--papers", n_papers, "graph nodes for the DI benchmark");
    app.add_option("--edges", n_edges, "citation edges");
    app.add_option("--rows", km_rows, "rows for the k-means benchmark");
    app.add_option("--dims", km_dims, "feature dimensions");
    app.add_option("--k", km_k, "clusters");
    app.add_option("--reps", reps, "repetitions, best time wins");
    CLI11_PARSE(app, argc, argv);

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("threads: %d\n\n", threads);
    std::printf("%-28s %12s %12s %9s\n", "kernel", "serial [s]", "parallel [s]", "speedup");

    {
        Corpus corpus = random_citation_corpus(n_papers, n_edges, 99);
        CitationGraph graph = CitationGraph::build(corpus);
        std::vector<PaperNode> all(n_papers);
        for (uint32_t i = 0; i < n_papers; ++i) all[i] = i;
        DiParams params{5, 5, SubThresholdPolicy::ReclassifyToI};

        auto serial = di_batch_serial(graph, all, params);
        auto parallel = di_batch(graph, all, params);
        for (size_t i = 0; i < all.size(); ++i) {
            if (serial[i].di != parallel[i].di || serial[i].defined != parallel[i].defined) {
                std::fprintf(stderr, "DI kernel mismatch at paper %zu\n", i);
                return 1;
            }
        }
        double ts = best_of(reps, [&] { di_batch_serial(graph, all, params); });
        double tp = best_of(reps, [&] { di_batch(graph, all, params); });
        std::printf("%-28s %12.3f %12.3f %8.2fx\n", "di_batch", ts, tp, ts / tp);
    }

    {
        BlobScenario blobs = gen_blobs(km_rows / uint32_t(km_k), km_k, km_dims, 5.0, 1.0, 7);
        KMeansResult km = kmeans(blobs.data, km_k, 1, 1);
        std::vector<uint32_t> a1, a2;
        double w1 = assign_points_serial(blobs.data, km.centroids, a1);
        double w2 = assign_points(blobs.data, km.centroids, a2);
        if (a1 != a2 || w1 != w2) {
            std::fprintf(stderr, "k-means assignment mismatch\n");
            return 1;
        }
        double ts = best_of(reps, [&] { assign_points_serial(blobs.data, km.centroids, a1); });
        double tp = best_of(reps, [&] { assign_points(blobs.data, km.centroids, a2); });
        std::printf("%-28s %12.3f %12.3f %8.2fx\n", "kmeans_assign", ts, tp, ts / tp);
    }

    {
        BlobScenario blobs = gen_blobs(2500, km_k, km_dims, 5.0, 1.0, 8);
        KMeansResult km = kmeans(blobs.data, km_k, 1, 1);
        double ts = best_of(reps, [&] {
            // silhouette with the parallel loop limited to one thread
#ifdef _OPENMP
            int saved = omp_get_max_threads();
            omp_set_num_threads(1);
            silhouette_score(blobs.data, km.assignments, km_k);
            omp_set_num_threads(saved);
#else
            silhouette_score(blobs.data, km.assignments, km_k);
#endif
        });
        double tp = best_of(reps, [&] { silhouette_score(blobs.data, km.assignments, km_k); });
        std::printf("%-28s %12.3f %12.3f %8.2fx\n", "silhouette", ts, tp, ts / tp);
    }
    return 0;
}

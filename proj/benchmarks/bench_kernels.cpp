// Times the serial reference kernels against their OpenMP counterparts and
// checks the outputs agree bit for bit.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "faultforge/kernels.hpp"
#include "faultforge/random_forest.hpp"
#include "faultforge/rng.hpp"
#include "faultforge/svm.hpp"

namespace {

using faultforge::Matrix;
namespace kernels = faultforge::kernels;
namespace classifiers = faultforge::classifiers;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    faultforge::rng::Engine eng(seed);
    Matrix m(rows, cols);
    for (double& v : m.data()) v = eng.uniform();
    return m;
}

template <class F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        best = std::min(best, dt);
    }
    return best;
}

void report(const std::string& name, double serial_s, double parallel_s, bool identical) {
    std::printf("%-24s serial %8.3f ms   omp %8.3f ms   speedup %5.2fx   %s\n", name.c_str(),
                serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s,
                identical ? "outputs identical" : "OUTPUT MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled\n");
#endif

    const Matrix a = random_matrix(1500, 20, 11);
    const Matrix b = random_matrix(2500, 20, 12);

    {
        Matrix out_s, out_p;
        const double ts = time_best_of(3, [&] { out_s = kernels::pairwise_sq_dists_serial(a, b); });
        const double tp = time_best_of(3, [&] { out_p = kernels::pairwise_sq_dists(a, b); });
        report("pairwise_sq_dists", ts, tp, out_s == out_p);
    }
    {
        Matrix q = a;
        faultforge::rng::Engine eng(13);
        for (std::size_t i = 0; i < q.rows(); ++i)
            for (std::size_t j = 0; j < q.cols(); ++j)
                if (eng.uniform() < 0.1) q.at(i, j) = Matrix::missing();
        Matrix out_s, out_p;
        const double ts = time_best_of(3, [&] { out_s = kernels::partial_sq_dists_serial(q, b); });
        const double tp = time_best_of(3, [&] { out_p = kernels::partial_sq_dists(q, b); });
        report("partial_sq_dists", ts, tp, out_s == out_p);
    }
    {
        Matrix out_s, out_p;
        const double ts = time_best_of(3, [&] { out_s = kernels::rbf_kernel_serial(a, b, 0.5); });
        const double tp = time_best_of(3, [&] { out_p = kernels::rbf_kernel(a, b, 0.5); });
        report("rbf_kernel", ts, tp, out_s == out_p);
    }
    {
        const Matrix X = random_matrix(4000, 12, 21);
        std::vector<int> y(X.rows());
        for (std::size_t i = 0; i < X.rows(); ++i)
            y[i] = (X.at(i, 0) + X.at(i, 1) * X.at(i, 2) > 0.7) ? 1 : 0;
        classifiers::RfParams params;
        params.n_estimators = 60;
        params.seed = 7;
        classifiers::ForestModel forest = classifiers::train_rf(X, y, params);

        std::vector<int> pred_s, pred_p;
        const double ts = time_best_of(3, [&] { pred_s = classifiers::predict_rf_serial(forest, X); });
        const double tp = time_best_of(3, [&] { pred_p = classifiers::predict_rf(forest, X); });
        report("forest_predict", ts, tp, pred_s == pred_p);

        classifiers::SvmParams sp;
        sp.C = 1.0;
        const Matrix Xs = random_matrix(900, 12, 22);
        std::vector<int> ys(Xs.rows());
        for (std::size_t i = 0; i < Xs.rows(); ++i) ys[i] = Xs.at(i, 0) > 0.5 ? 1 : 0;
        const classifiers::SvmModel svm = classifiers::train_svm(Xs, ys, sp);
        std::vector<double> f_s, f_p;
        const double ss = time_best_of(3, [&] { f_s = classifiers::svm_decision_serial(svm, Xs); });
        const double pp = time_best_of(3, [&] { f_p = classifiers::svm_decision(svm, Xs); });
        report("svm_decision", ss, pp, f_s == f_p);
    }
    return 0;
}

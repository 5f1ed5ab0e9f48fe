#include "faultforge/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "faultforge/errors.hpp"

namespace faultforge::model_io {

namespace {

constexpr int kVersion = 1;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Reader {
    std::istringstream in;
    explicit Reader(const std::string& text) : in(text) {}

    std::string word() {
        std::string w;
        if (!(in >> w)) throw Error("model file truncated");
        return w;
    }
    double num() { return std::stod(word()); }
    long integer() { return std::stol(word()); }

    void expect(const std::string& token) {
        const std::string w = word();
        if (w != token) throw Error("model file: expected '" + token + "', found '" + w + "'");
    }
};

}  // namespace

std::string to_text(const AnyModel& m) {
    std::string out = "faultforge-model " + std::to_string(kVersion) + " ";
    if (const auto* lr = std::get_if<classifiers::LinearModel>(&m)) {
        out += "lr\n";
        out += "intercept " + fmt(lr->beta0) + "\n";
        out += "coefficients " + std::to_string(lr->beta.size());
        for (double b : lr->beta) out += " " + fmt(b);
        out += "\n";
    } else if (const auto* rf = std::get_if<classifiers::ForestModel>(&m)) {
        out += "rf\n";
        out += "features " + std::to_string(rf->n_features) + "\n";
        out += "trees " + std::to_string(rf->trees.size()) + "\n";
        for (const auto& tree : rf->trees) {
            out += "tree " + std::to_string(tree.nodes.size()) + "\n";
            for (const auto& n : tree.nodes) {
                out += std::to_string(n.feature) + " " + fmt(n.threshold) + " " +
                       std::to_string(n.left) + " " + std::to_string(n.right) + " " +
                       std::to_string(n.count0) + " " + std::to_string(n.count1) + " " +
                       std::to_string(n.leaf_class) + "\n";
            }
        }
    } else {
        const auto& svm = std::get<classifiers::SvmModel>(m);
        out += "svm\n";
        out += std::string("kernel ") +
               (svm.kernel == classifiers::Kernel::Linear ? "linear" : "rbf") + "\n";
        out += "gamma " + fmt(svm.gamma) + "\n";
        out += "C " + fmt(svm.C) + "\n";
        out += "bias " + fmt(svm.b) + "\n";
        out += "support " + std::to_string(svm.n_support()) + " " +
               std::to_string(svm.support_vectors.cols()) + "\n";
        for (std::size_t i = 0; i < svm.n_support(); ++i) {
            out += fmt(svm.alphas[i]) + " " + std::to_string(svm.sv_labels[i]);
            for (double v : svm.support_vectors.row(i)) out += " " + fmt(v);
            out += "\n";
        }
    }
    return out;
}

AnyModel from_text(const std::string& text) {
    Reader r(text);
    r.expect("faultforge-model");
    const long version = r.integer();
    if (version != kVersion)
        throw Error("unsupported model version " + std::to_string(version));
    const std::string kind = r.word();

    if (kind == "lr") {
        classifiers::LinearModel m;
        r.expect("intercept");
        m.beta0 = r.num();
        r.expect("coefficients");
        const long p = r.integer();
        m.beta.resize(static_cast<std::size_t>(p));
        for (double& b : m.beta) b = r.num();
        return m;
    }
    if (kind == "rf") {
        classifiers::ForestModel m;
        r.expect("features");
        m.n_features = static_cast<std::size_t>(r.integer());
        r.expect("trees");
        const long t_count = r.integer();
        m.trees.resize(static_cast<std::size_t>(t_count));
        for (auto& tree : m.trees) {
            r.expect("tree");
            const long n_count = r.integer();
            tree.nodes.resize(static_cast<std::size_t>(n_count));
            for (auto& n : tree.nodes) {
                n.feature = static_cast<int>(r.integer());
                n.threshold = r.num();
                n.left = static_cast<int>(r.integer());
                n.right = static_cast<int>(r.integer());
                n.count0 = static_cast<std::uint32_t>(r.integer());
                n.count1 = static_cast<std::uint32_t>(r.integer());
                n.leaf_class = static_cast<int>(r.integer());
            }
        }
        return m;
    }
    if (kind == "svm") {
        classifiers::SvmModel m;
        r.expect("kernel");
        const std::string k = r.word();
        if (k != "linear" && k != "rbf") throw Error("model file: unknown kernel " + k);
        m.kernel = k == "linear" ? classifiers::Kernel::Linear : classifiers::Kernel::Rbf;
        r.expect("gamma");
        m.gamma = r.num();
        r.expect("C");
        m.C = r.num();
        r.expect("bias");
        m.b = r.num();
        r.expect("support");
        const long n_sv = r.integer();
        const long p = r.integer();
        if (n_sv < 1) throw Error("model file: svm must keep at least one support vector");
        m.support_vectors = Matrix(static_cast<std::size_t>(n_sv), static_cast<std::size_t>(p));
        m.alphas.resize(static_cast<std::size_t>(n_sv));
        m.sv_labels.resize(static_cast<std::size_t>(n_sv));
        for (long i = 0; i < n_sv; ++i) {
            m.alphas[static_cast<std::size_t>(i)] = r.num();
            m.sv_labels[static_cast<std::size_t>(i)] = static_cast<int>(r.integer());
            for (long d = 0; d < p; ++d)
                m.support_vectors.at(static_cast<std::size_t>(i), static_cast<std::size_t>(d)) =
                    r.num();
        }
        return m;
    }
    throw Error("model file: unknown kind " + kind);
}

void save_model(const AnyModel& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write model file: " + path);
    out << to_text(m);
}

AnyModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

}  // namespace faultforge::model_io

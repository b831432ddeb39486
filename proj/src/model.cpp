#include "qus/model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "qus/dsi.hpp"
#include "qus/error.hpp"

namespace qus {
using json = nlohmann::json;

namespace {

json vec_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json mat_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        rows.push_back(vec_json(m.row(i).transpose()));
    }
    return rows;
}

Vector json_vec(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix json_mat(const json& j, Eigen::Index cols) {
    Matrix m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Vector row = json_vec(j[i]);
        require(row.size() == cols, ErrorCode::bad_schema, "ragged matrix in model file");
        m.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return m;
}

std::vector<double> training_scores(const TrainedModel& model, const Matrix& xs, Scorer s) {
    std::vector<double> out;
    for (Eigen::Index i = 0; i < xs.rows(); ++i) {
        const Vector x = xs.row(i).transpose();
        switch (s) {
            case Scorer::pc1: out.push_back(pc1_score(model.pca, x)); break;
            case Scorer::projection: out.push_back(projection_score(x, model.reference)); break;
            case Scorer::svm_distance: out.push_back(svm_distance(model.svm, x).value); break;
        }
    }
    return out;
}

}  // namespace

double MalignancyScore::get(Scorer scorer) const {
    switch (scorer) {
        case Scorer::pc1: return pc1;
        case Scorer::projection: return projection;
        case Scorer::svm_distance: return svm_distance;
    }
    return 0.0;
}

Vector feature_columns(const FeatureVector& fv, std::span<const Feature> features) {
    Vector v(static_cast<Eigen::Index>(features.size()));
    for (std::size_t j = 0; j < features.size(); ++j) {
        v(static_cast<Eigen::Index>(j)) = fv[features[j]];
    }
    return v;
}

Matrix feature_table(std::span<const FeatureVector> rows, std::span<const Feature> features) {
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(features.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        m.row(static_cast<Eigen::Index>(i)) = feature_columns(rows[i], features).transpose();
    }
    return m;
}

TrainedModel train_model(const Matrix& raw, std::span<const int> labels, std::vector<Feature> features,
                         const TrainOptions& options, TrainReport* report) {
    require(!features.empty() && static_cast<Eigen::Index>(features.size()) == raw.cols(), ErrorCode::shape_mismatch,
            "feature list does not match the table width");
    require(static_cast<Eigen::Index>(labels.size()) == raw.rows(), ErrorCode::shape_mismatch,
            "label count does not match rows");
    require_binary_labels(labels);

    TrainedModel model;
    model.features = std::move(features);
    model.scorer = options.scorer;
    model.standardizer = Standardizer::fit(raw);
    const Matrix xs = model.standardizer.transform(raw);
    model.pca = pca_fit(xs, labels);
    model.reference = fit_reference(xs, labels);

    SvmParams params = options.svm;
    TuneResult tuning;
    if (options.tune) {
        tuning = tune_hyperparams(xs, labels, options.tuning);
        params.c = tuning.c;
        params.gamma = tuning.gamma;
    }
    model.svm = svm_train(xs, labels, params);

    for (Scorer s : {Scorer::pc1, Scorer::projection, Scorer::svm_distance}) {
        const auto scores = training_scores(model, xs, s);
        if (scores.size() >= 10) {
            const auto scale = calibrate_scale(scores);
            model.limits[static_cast<std::size_t>(s)] = {scale.lo, scale.hi};
        } else {
            // too few rows for percentiles: the full training range
            const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
            model.limits[static_cast<std::size_t>(s)] =
                *lo < *hi ? ScoreLimits{*lo, *hi} : ScoreLimits{*lo - 1e-6, *hi + 1e-6};
        }
    }
    if (report != nullptr) {
        report->tuning = std::move(tuning);
        report->pca_rank_deficient = model.pca.rank_deficient;
    }
    return model;
}

MalignancyScore score(const TrainedModel& model, const Vector& raw) {
    const Vector x = model.standardizer.transform(raw);
    MalignancyScore s;
    s.pc1 = pc1_score(model.pca, x);
    s.projection = projection_score(x, model.reference);
    const auto d = svm_distance(model.svm, x);
    s.svm_distance = d.value;
    s.svm_sign = d.sign;
    return s;
}

double score_with(const TrainedModel& model, Scorer scorer, const Vector& raw) {
    const Vector x = model.standardizer.transform(raw);
    switch (scorer) {
        case Scorer::pc1: return pc1_score(model.pca, x);
        case Scorer::projection: return projection_score(x, model.reference);
        case Scorer::svm_distance: return svm_distance(model.svm, x).value;
    }
    return 0.0;
}

json model_to_json(const TrainedModel& model) {
    json features = json::array();
    for (auto f : model.features) {
        features.push_back(std::string(name_of(f)));
    }
    json limits = json::object();
    for (Scorer s : {Scorer::pc1, Scorer::projection, Scorer::svm_distance}) {
        const auto& l = model.limits_for(s);
        limits[std::string(to_string(s))] = {{"lo", l.lo}, {"hi", l.hi}};
    }
    return {
        {"schema", kModelSchema},
        {"features", features},
        {"scorer", std::string(to_string(model.scorer))},
        {"standardizer", {{"mean", vec_json(model.standardizer.mean)}, {"std", vec_json(model.standardizer.std)}}},
        {"pca",
         {{"mean", vec_json(model.pca.mean)},
          {"loadings", mat_json(model.pca.loadings)},
          {"eigenvalues", vec_json(model.pca.eigenvalues)},
          {"explained_ratio", vec_json(model.pca.explained_ratio)},
          {"rank_deficient", model.pca.rank_deficient}}},
        {"reference", vec_json(model.reference)},
        {"svm",
         {{"c", model.svm.c},
          {"gamma", model.svm.gamma},
          {"bias", model.svm.bias},
          {"w_norm", model.svm.w_norm},
          {"dual_coef", vec_json(model.svm.dual_coef)},
          {"support_vectors", mat_json(model.svm.support_vectors)}}},
        {"score_limits", limits},
    };
}

TrainedModel model_from_json(const json& doc) {
    try {
        require(doc.value("schema", std::string()) == kModelSchema, ErrorCode::bad_schema, "not a model-v1 document");
        TrainedModel m;
        for (const auto& name : doc.at("features")) {
            const auto f = parse_feature(name.get<std::string>());
            require(f.has_value(), ErrorCode::bad_schema, "unknown feature in model: " + name.get<std::string>());
            m.features.push_back(*f);
        }
        const auto d = static_cast<Eigen::Index>(m.features.size());
        m.scorer = parse_scorer(doc.at("scorer").get<std::string>());
        m.standardizer.mean = json_vec(doc.at("standardizer").at("mean"));
        m.standardizer.std = json_vec(doc.at("standardizer").at("std"));
        const auto& pca = doc.at("pca");
        m.pca.mean = json_vec(pca.at("mean"));
        m.pca.eigenvalues = json_vec(pca.at("eigenvalues"));
        m.pca.explained_ratio = json_vec(pca.at("explained_ratio"));
        m.pca.loadings = json_mat(pca.at("loadings"), m.pca.eigenvalues.size());
        m.pca.rank_deficient = pca.at("rank_deficient").get<bool>();
        m.reference = json_vec(doc.at("reference"));
        const auto& svm = doc.at("svm");
        m.svm.c = svm.at("c").get<double>();
        m.svm.gamma = svm.at("gamma").get<double>();
        m.svm.bias = svm.at("bias").get<double>();
        m.svm.w_norm = svm.at("w_norm").get<double>();
        m.svm.dual_coef = json_vec(svm.at("dual_coef"));
        m.svm.support_vectors = json_mat(svm.at("support_vectors"), d);
        for (Scorer s : {Scorer::pc1, Scorer::projection, Scorer::svm_distance}) {
            const auto& l = doc.at("score_limits").at(std::string(to_string(s)));
            m.limits[static_cast<std::size_t>(s)] = {l.at("lo").get<double>(), l.at("hi").get<double>()};
        }
        require(m.standardizer.mean.size() == d && m.standardizer.std.size() == d && m.pca.mean.size() == d &&
                    m.pca.loadings.rows() == d && m.reference.size() == d &&
                    m.svm.dual_coef.size() == m.svm.support_vectors.rows(),
                ErrorCode::bad_schema, "model dimensions are inconsistent");
        return m;
    } catch (const json::exception& e) {
        fail(ErrorCode::bad_schema, std::string("malformed model document: ") + e.what());
    }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::io_error, "cannot write model " + path.string());
    out << model_to_json(model).dump(2) << '\n';
    require(static_cast<bool>(out), ErrorCode::io_error, "short write to " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::io_error, "cannot open model " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::bad_schema, "malformed model " + path.string() + ": " + e.what());
    }
    return model_from_json(doc);
}

}  // namespace qus

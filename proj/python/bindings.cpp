// numpy-facing wrappers around the core library.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "contrex/attributes.hpp"
#include "contrex/metrics.hpp"
#include "contrex/models.hpp"
#include "contrex/saliency.hpp"
#include "contrex/synthetic.hpp"
#include "contrex/traversal.hpp"

namespace py = pybind11;
using namespace contrex;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

template <class Tag>
Raster<Tag> to_raster(const Array& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
    const Shape shape{static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1))};
    return Raster<Tag>(shape, std::vector<double>(a.data(), a.data() + a.size()));
}

template <class Tag>
Array to_array(const Raster<Tag>& r) {
    Array out({r.height(), r.width()});
    std::copy(r.storage().begin(), r.storage().end(), out.mutable_data());
    return out;
}

Vector to_vector(const Array& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D array");
    return Vector(std::vector<double>(a.data(), a.data() + a.size()));
}

Array vector_array(const Vector& v) {
    Array out(static_cast<py::ssize_t>(v.dim()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

Matrix to_matrix(const Array& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
    return Matrix(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)),
                  std::vector<double>(a.data(), a.data() + a.size()));
}

Array matrix_array(const Matrix& m) {
    Array out({m.rows(), m.cols()});
    std::copy(m.storage().begin(), m.storage().end(), out.mutable_data());
    return out;
}

std::vector<Vector> to_vectors(const Array& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array of latents (one per row)");
    std::vector<Vector> out;
    const auto d = static_cast<std::size_t>(a.shape(1));
    for (py::ssize_t r = 0; r < a.shape(0); ++r) {
        out.emplace_back(std::vector<double>(a.data() + r * a.shape(1), a.data() + r * a.shape(1) + d));
    }
    return out;
}

py::object optional_index(const std::optional<std::size_t>& i) {
    return i ? py::object(py::int_(*i)) : py::object(py::none());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Contrastive explanations along latent attribute paths";

    py::class_<GeneratorModel>(m, "Generator")
        .def(py::init([](std::size_t height, std::size_t width, const Array& basis, const Array& bias) {
                 return GeneratorModel({height, width}, to_matrix(basis), to_vector(bias));
             }),
             py::arg("height"), py::arg("width"), py::arg("basis"), py::arg("bias"))
        .def_property_readonly("latent_dim", &GeneratorModel::latent_dim)
        .def_property_readonly("shape", [](const GeneratorModel& g) { return py::make_tuple(g.shape().height, g.shape().width); })
        .def_property_readonly("basis", [](const GeneratorModel& g) { return matrix_array(g.first_layer_weights()); })
        .def_property_readonly("bias", [](const GeneratorModel& g) { return vector_array(g.bias()); });

    py::class_<ClassifierModel>(m, "Classifier")
        .def_static("logistic", [](const Array& weights, double bias) {
            const auto shape = to_raster<ImageTag>(weights).shape();
            return ClassifierModel(shape, LogisticParams{std::vector<double>(weights.data(), weights.data() + weights.size()), bias});
        }, py::arg("weights"), py::arg("bias"))
        .def_property_readonly("architecture", [](const ClassifierModel& c) { return std::string(to_string(c.architecture())); })
        .def_property_readonly("shape", [](const ClassifierModel& c) { return py::make_tuple(c.input_shape().height, c.input_shape().width); });

    py::class_<AttributeVector>(m, "AttributeVector")
        .def(py::init([](const Array& d, std::size_t rank, double eigenvalue) {
                 return AttributeVector(to_vector(d), rank, eigenvalue);
             }),
             py::arg("direction"), py::arg("rank") = 0, py::arg("eigenvalue") = 0.0)
        .def_property_readonly("direction", [](const AttributeVector& a) { return vector_array(a.direction()); })
        .def_property_readonly("rank", &AttributeVector::rank)
        .def_property_readonly("eigenvalue", &AttributeVector::eigenvalue)
        .def("flipped", &AttributeVector::flipped);

    py::class_<PlantedGenerator>(m, "PlantedGenerator")
        .def_readonly("generator", &PlantedGenerator::generator)
        .def_readonly("truth", &PlantedGenerator::truth)
        .def_readonly("lesion_axis", &PlantedGenerator::lesion_axis)
        .def_readonly("full_lesion_coordinate", &PlantedGenerator::full_lesion_coordinate)
        .def_property_readonly("mask", [](const PlantedGenerator& p) { return to_array(p.mask); });

    py::class_<TraversalPath>(m, "TraversalPath")
        .def_readonly("attribute", &TraversalPath::attribute)
        .def_readonly("alphas", &TraversalPath::alphas)
        .def_readonly("scores", &TraversalPath::scores)
        .def_readonly("query_index", &TraversalPath::query_index)
        .def_property_readonly("images", [](const TraversalPath& p) {
            py::list out;
            for (const auto& img : p.images) out.append(to_array(img));
            return out;
        })
        .def("__len__", &TraversalPath::size);

    py::class_<SicCurve>(m, "SicCurve")
        .def_readonly("auc", &SicCurve::auc)
        .def_property_readonly("fractions", [](const SicCurve& c) {
            std::vector<double> out;
            for (const auto& p : c.points) out.push_back(p.fraction);
            return out;
        })
        .def_property_readonly("normalized_softmax", [](const SicCurve& c) {
            std::vector<double> out;
            for (const auto& p : c.points) out.push_back(p.normalized_softmax);
            return out;
        });

    m.def("generate", [](const GeneratorModel& g, const Array& w) { return to_array(generate(g, to_vector(w))); },
          py::arg("generator"), py::arg("latent"));
    m.def("classify", [](const ClassifierModel& c, const Array& x) { return classify(c, to_raster<ImageTag>(x)); },
          py::arg("classifier"), py::arg("image"));
    m.def("input_gradient",
          [](const ClassifierModel& c, const Array& x) { return to_array(input_gradient(c, to_raster<ImageTag>(x))); },
          py::arg("classifier"), py::arg("image"));

    m.def("sefa_directions", [](const Array& a, std::size_t n) { return sefa_directions(to_matrix(a), n); },
          py::arg("weights"), py::arg("n"));
    m.def("select_attribute",
          [](const std::vector<AttributeVector>& dirs, const Array& seeds, const Array& background) {
              return select_attribute(dirs, to_vectors(seeds), to_vectors(background));
          },
          py::arg("directions"), py::arg("seeds"), py::arg("background"));

    m.def("build_path",
          [](const GeneratorModel& g, const ClassifierModel& c, const Array& w, const AttributeVector& a,
             double alpha_min, double alpha_max, std::size_t steps) {
              return build_path(g, c, to_vector(w), a, {alpha_min, alpha_max, steps});
          },
          py::arg("generator"), py::arg("classifier"), py::arg("latent"), py::arg("attribute"),
          py::arg("alpha_min") = 0.0, py::arg("alpha_max") = 30.0, py::arg("steps") = 30);
    m.def("retrieve_contrastives", [](const TraversalPath& p) {
        const auto pair = retrieve_contrastives(p);
        return py::make_tuple(optional_index(pair.counterfactual), optional_index(pair.semifactual));
    }, py::arg("path"), "Returns (counterfactual index, semifactual index); None when absent.");

    m.def("directional_diff",
          [](const Array& q, const Array& n) {
              return to_array(directional_diff(to_raster<ImageTag>(q), to_raster<ImageTag>(n)));
          },
          py::arg("query"), py::arg("neighbor"));
    m.def("contrastive_saliency",
          [](const ClassifierModel& c, const TraversalPath& p, bool normalize_by_alpha) {
              ContrastiveOptions opts;
              opts.normalize_by_alpha = normalize_by_alpha;
              return to_array(contrastive_saliency(c, p, opts));
          },
          py::arg("classifier"), py::arg("path"), py::arg("normalize_by_alpha") = false);
    m.def("mean_threshold", [](const Array& raw) { return to_array(mean_threshold(to_raster<SignedMapTag>(raw))); },
          py::arg("raw"));
    m.def("integrated_gradients",
          [](const ClassifierModel& c, const Array& x, const Array& b, std::size_t steps, bool signed_values) {
              const auto xi = to_raster<ImageTag>(x);
              const auto bi = to_raster<ImageTag>(b);
              return signed_values ? to_array(integrated_gradients_signed(c, xi, bi, steps))
                                   : to_array(integrated_gradients(c, xi, bi, steps));
          },
          py::arg("classifier"), py::arg("image"), py::arg("baseline"), py::arg("steps") = 64,
          py::arg("signed") = false);
    m.def("smoothgrad",
          [](const ClassifierModel& c, const Array& x, double sd, std::size_t samples, std::uint64_t seed) {
              return to_array(smoothgrad(c, to_raster<ImageTag>(x), sd, samples, seed));
          },
          py::arg("classifier"), py::arg("image"), py::arg("noise_sd") = 0.1, py::arg("samples") = 16,
          py::arg("seed") = 0);
    m.def("plain_gradient",
          [](const ClassifierModel& c, const Array& x) { return to_array(plain_gradient(c, to_raster<ImageTag>(x))); },
          py::arg("classifier"), py::arg("image"));

    m.def("gaussian_blur", [](const Array& x, double sigma) { return to_array(gaussian_blur(to_raster<ImageTag>(x), sigma)); },
          py::arg("image"), py::arg("sigma") = 8.0);
    m.def("sic_curve",
          [](const ClassifierModel& c, const Array& x, const Array& s, double blur_sigma) {
              SicOptions opts;
              opts.blur_sigma = blur_sigma;
              return sic_curve(c, to_raster<ImageTag>(x), to_raster<SaliencyTag>(s), opts);
          },
          py::arg("classifier"), py::arg("image"), py::arg("saliency"), py::arg("blur_sigma") = 8.0);

    m.def("make_planted_generator",
          [](std::size_t height, std::size_t width, std::size_t latent_dim, std::size_t axis, std::uint64_t seed) {
              return make_planted_generator(Geometry{height, width, latent_dim}, axis, seed);
          },
          py::arg("height") = 64, py::arg("width") = 64, py::arg("latent_dim") = 8, py::arg("lesion_axis") = 0,
          py::arg("seed") = 7);
    m.def("make_lesion_dataset",
          [](std::size_t n, std::size_t height, std::size_t width, std::uint64_t seed) {
              const auto data = make_lesion_dataset(n, {height, width}, seed);
              py::array_t<double> images({n, height, width});
              py::array_t<double> masks({n, height, width});
              for (std::size_t i = 0; i < n; ++i) {
                  std::copy(data.images[i].storage().begin(), data.images[i].storage().end(),
                            images.mutable_data() + i * height * width);
                  std::copy(data.masks[i].storage().begin(), data.masks[i].storage().end(),
                            masks.mutable_data() + i * height * width);
              }
              return py::make_tuple(images, data.labels, masks);
          },
          py::arg("n"), py::arg("height") = 64, py::arg("width") = 64, py::arg("seed") = 7,
          "Returns (images[n,h,w], labels, masks[n,h,w]).");
    m.def("train_classifier",
          [](const Array& images, const std::vector<int>& labels, const std::string& architecture,
             std::size_t hidden_width, std::size_t epochs, double learning_rate, std::size_t batch_size,
             std::uint64_t seed) {
              if (images.ndim() != 3) throw std::invalid_argument("expected images shaped [n, h, w]");
              const Shape shape{static_cast<std::size_t>(images.shape(1)), static_cast<std::size_t>(images.shape(2))};
              LabeledDataset data;
              for (py::ssize_t i = 0; i < images.shape(0); ++i) {
                  const double* p = images.data() + i * static_cast<py::ssize_t>(shape.size());
                  data.images.emplace_back(shape, std::vector<double>(p, p + shape.size()));
              }
              data.labels = labels;
              TrainOptions opts;
              opts.architecture = architecture_from_string(architecture);
              opts.hidden_width = hidden_width;
              opts.epochs = epochs;
              opts.learning_rate = learning_rate;
              opts.batch_size = batch_size;
              opts.seed = seed;
              auto result = train_classifier(data, opts);
              return py::make_tuple(std::move(result.model), result.final_loss);
          },
          py::arg("images"), py::arg("labels"), py::arg("architecture") = "logistic", py::arg("hidden_width") = 16,
          py::arg("epochs") = 40, py::arg("learning_rate") = 0.05, py::arg("batch_size") = 32, py::arg("seed") = 7,
          "Returns (classifier, final training loss).");
}

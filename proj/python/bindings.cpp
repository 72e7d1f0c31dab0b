#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include "roar/bench.hpp"
#include "roar/ingest.hpp"
#include "roar/rle.hpp"
#include "roar/roaring_bitmap.hpp"

namespace py = pybind11;
using namespace roar;

namespace {

template <RleFormat F>
void bind_rle(py::module_& m, const char* name) {
  using B = RleBitmap<F>;
  py::class_<B>(m, name)
      .def(py::init<>())
      .def_static("encode", [](std::vector<std::uint32_t> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return B::encode(v);
      }, py::arg("values"))
      .def_static("from_words", &B::from_words, py::arg("words"))
      .def("decode", &B::decode)
      .def("words", [](const B& b) { return std::vector<std::uint32_t>(b.words().begin(), b.words().end()); })
      .def_property_readonly("size_bits", &B::size_bits)
      .def_property_readonly("segment_count", &B::segment_count)
      .def("__len__", &B::cardinality)
      .def("__contains__", &B::contains)
      .def("append", &B::append)
      .def("add", &B::add)
      .def("remove", &B::remove)
      .def("__and__", [](const B& a, const B& b) { return rle_and(a, b); })
      .def("__or__", [](const B& a, const B& b) { return rle_or(a, b); })
      .def(py::self == py::self);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<RleFormatError>(m, "RleFormatError", PyExc_ValueError);
  py::register_exception<IngestError>(m, "IngestError", PyExc_ValueError);

  py::class_<RoaringBitmap>(m, "RoaringBitmap")
      .def(py::init<>())
      .def(py::init([](const std::vector<std::uint32_t>& v) { return RoaringBitmap::from_values(v); }),
           py::arg("values"))
      .def("add", &RoaringBitmap::add)
      .def("remove", &RoaringBitmap::remove)
      .def("__contains__", &RoaringBitmap::contains)
      .def("__len__", &RoaringBitmap::cardinality)
      .def("rank", &RoaringBitmap::rank)
      .def("select", &RoaringBitmap::select)
      .def("to_list", &RoaringBitmap::to_vector)
      .def("__iter__", [](const RoaringBitmap& r) { return py::iter(py::cast(r.to_vector())); })
      .def("size_in_bytes", &RoaringBitmap::size_in_bytes)
      .def("trim", &RoaringBitmap::trim)
      .def("containers", [](const RoaringBitmap& r) {
        std::vector<std::tuple<int, std::string, int>> out;
        for (const auto& e : r.entries()) {
          out.emplace_back(e.key, std::string(kind_name(e.container)), cardinality(e.container));
        }
        return out;
      })
      .def("serialize", [](const RoaringBitmap& r) {
        const auto b = r.serialize();
        return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
      })
      .def_static("deserialize", [](py::bytes data) {
        const std::string s = data;
        return RoaringBitmap::deserialize(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
      })
      .def("__and__", [](const RoaringBitmap& a, const RoaringBitmap& b) { return a & b; })
      .def("__or__", [](const RoaringBitmap& a, const RoaringBitmap& b) { return a | b; })
      .def("__ior__", [](RoaringBitmap& a, const RoaringBitmap& b) -> RoaringBitmap& { return a |= b; })
      .def("__iand__", [](RoaringBitmap& a, const RoaringBitmap& b) -> RoaringBitmap& { return a &= b; })
      .def(py::self == py::self)
      .def("__repr__", [](const RoaringBitmap& r) {
        return "RoaringBitmap(cardinality=" + std::to_string(r.cardinality()) + ")";
      });

  m.def("multi_or", [](const std::vector<const RoaringBitmap*>& bitmaps) {
    return multi_or(std::span<const RoaringBitmap* const>(bitmaps));
  }, py::arg("bitmaps"));

  bind_rle<RleFormat::kWah>(m, "WahBitmap");
  bind_rle<RleFormat::kConcise>(m, "ConciseBitmap");

  m.def("gen_uniform", &gen_uniform, py::arg("density"), py::arg("draws"), py::arg("seed"));
  m.def("gen_beta", &gen_beta, py::arg("density"), py::arg("draws"), py::arg("seed"));

  m.def("build_index", [](const std::string& path) {
    const auto index = build_index(std::filesystem::path(path));
    std::map<std::string, std::map<std::string, RoaringBitmap>> out;
    for (const auto& c : index.columns) out[c.name] = c.bitmaps;
    return out;
  }, py::arg("csv_path"), "Per column, value -> bitmap of 0-based rows.");
}

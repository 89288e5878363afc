#include <pybind11/pybind11.h>

namespace py = pybind11;

PYBIND11_MODULE(_equatorflow, m) {
  m.doc() = "equatorflow core bindings";
}

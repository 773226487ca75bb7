#include <pybind11/pybind11.h>
PYBIND11_MODULE(pymodstein, m) { m.doc() = "placeholder"; }

#include <pybind11/pybind11.h>

PYBIND11_MODULE(_ncdx, m) {
    m.doc() = "exact noncommutative bispectral Darboux transformations";
}

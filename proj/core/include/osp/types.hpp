#pragma once

#include <complex>

namespace osp {

using Complex = std::complex<double>;

// Axis-aligned rectangle in the spectral plane.
struct Rect {
    double re_min = 0.0;
    double re_max = 0.0;
    double im_min = 0.0;
    double im_max = 0.0;

    bool contains(Complex z) const {
        return z.real() >= re_min && z.real() <= re_max &&
               z.imag() >= im_min && z.imag() <= im_max;
    }
    Rect intersect(const Rect& other) const {
        return Rect{std::max(re_min, other.re_min), std::min(re_max, other.re_max),
                    std::max(im_min, other.im_min), std::min(im_max, other.im_max)};
    }
    bool empty() const { return re_min > re_max || im_min > im_max; }
};

}  // namespace osp

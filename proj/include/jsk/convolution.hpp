#pragma once

#include <complex>

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include "jsk/error.hpp"

namespace jsk {

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Circular convolution and cross-correlation of real vectors.
///
/// Lengths up to kDirectMax are summed directly (exact for integer data);
/// longer ones go through the FFT. The instance caches transform plans, so
/// reuse it across calls.
template <class Scalar>
class CircularOps {
public:
    using RealVector = Vector<Scalar>;
    using ComplexVector = Vector<std::complex<Scalar>>;

    static constexpr Eigen::Index kDirectMax = 16;

    /// (x * y)_j = sum_i x_i y_{(j - i) mod m}
    template <class DX, class DY>
    RealVector convolve(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
        check(x.size(), y.size());
        return x.size() <= kDirectMax ? direct(x, y, -1) : convolve_fft(x, y);
    }

    /// (x ⋆ y)_j = sum_i x_i y_{(j + i) mod m}
    template <class DX, class DY>
    RealVector cross_correlate(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
        check(x.size(), y.size());
        return x.size() <= kDirectMax ? direct(x, y, +1) : cross_correlate_fft(x, y);
    }

    template <class DX, class DY>
    RealVector convolve_fft(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
        check(x.size(), y.size());
        forward(x, fx_);
        forward(y, fy_);
        fx_.array() *= fy_.array();
        return inverse(fx_);
    }

    /// IFFT(conj(FFT(x)) . FFT(y))
    template <class DX, class DY>
    RealVector cross_correlate_fft(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
        check(x.size(), y.size());
        forward(x, fx_);
        forward(y, fy_);
        fx_.array() = fx_.array().conjugate() * fy_.array();
        return inverse(fx_);
    }

private:
    static void check(Eigen::Index a, Eigen::Index b) {
        if (a != b) throw UsageError("circular operation on vectors of different lengths");
    }

    // direction -1: y index j - i (convolution); +1: j + i (correlation)
    template <class DX, class DY>
    static RealVector direct(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y, int direction) {
        const Eigen::Index m = x.size();
        RealVector out = RealVector::Zero(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const Scalar xi = x(i);
            if (xi == Scalar(0)) continue;
            for (Eigen::Index j = 0; j < m; ++j) {
                Eigen::Index k = direction > 0 ? j + i : j - i;
                k = k >= m ? k - m : (k < 0 ? k + m : k);
                out(j) += xi * y(k);
            }
        }
        return out;
    }

    template <class D>
    void forward(const Eigen::MatrixBase<D>& x, ComplexVector& out) {
        buf_ = x;
        out.resize(buf_.size());
        if (buf_.size() == 1) {
            out(0) = buf_(0);
            return;
        }
        fft_.fwd(out, buf_);
    }

    RealVector inverse(const ComplexVector& spectrum) {
        RealVector out(spectrum.size());
        if (spectrum.size() == 1) {
            out(0) = spectrum(0).real();
            return out;
        }
        fft_.inv(out, spectrum);
        return out;
    }

    Eigen::FFT<Scalar> fft_;
    RealVector buf_;
    ComplexVector fx_;
    ComplexVector fy_;
};

template <class DX, class DY>
Vector<typename DX::Scalar> circ_convolve(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
    CircularOps<typename DX::Scalar> ops;
    return ops.convolve(x, y);
}

template <class DX, class DY>
Vector<typename DX::Scalar> circ_cross_correlate(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
    CircularOps<typename DX::Scalar> ops;
    return ops.cross_correlate(x, y);
}

}  // namespace jsk

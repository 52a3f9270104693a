#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef TLSPH_USE_OPENMP
#include <omp.h>
#endif

namespace tlsph
{
using Real = double;
using Vecd = Eigen::Matrix<Real, 3, 1>;
using Matd = Eigen::Matrix<Real, 3, 3>;
using Index = std::size_t;

constexpr int Dimensions = 3;

//=================================================================================================//
// Error hierarchy. The CLI maps ConfigurationError/ParameterError/ParseError/IoError to exit 2
// and NumericalError to exit 3.
//=================================================================================================//
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public Error
{
  public:
    using Error::Error;
};

class ConfigurationError : public Error
{
  public:
    using Error::Error;
};

class ParseError : public Error
{
  public:
    using Error::Error;
};

class IoError : public Error
{
  public:
    using Error::Error;
};

class NumericalError : public Error
{
  public:
    using Error::Error;
};

/** Raised when det F <= 0 at a particle. */
class ElementInversionError : public NumericalError
{
  public:
    ElementInversionError(Index particle, Real det_F)
        : NumericalError("element inversion at particle " + std::to_string(particle) +
                         " (det F = " + std::to_string(det_F) + ")"),
          particle_(particle), det_F_(det_F) {}

    Index particle() const { return particle_; }
    Real detF() const { return det_F_; }

  private:
    Index particle_;
    Real det_F_;
};

/**
 * Run `body(i)` for i in [0, n). Each call must only write slots owned by i.
 * If bodies throw, the exception of the lowest failing index is rethrown after the loop.
 */
template <typename Body>
void particle_for(Index n, const Body &body)
{
#ifdef TLSPH_USE_OPENMP
    std::exception_ptr failure;
    Index failed_at = n;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
    {
        try
        {
            body(static_cast<Index>(i));
        }
        catch (...)
        {
#pragma omp critical(tlsph_particle_for)
            if (static_cast<Index>(i) < failed_at)
            {
                failed_at = static_cast<Index>(i);
                failure = std::current_exception();
            }
        }
    }
    if (failure)
        std::rethrow_exception(failure);
#else
    for (Index i = 0; i != n; ++i)
        body(i);
#endif
}

inline void set_thread_count(int threads)
{
#ifdef TLSPH_USE_OPENMP
    if (threads > 0)
        omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

inline bool is_finite(const Vecd &v) { return v.allFinite(); }
inline bool is_finite(const Matd &m) { return m.allFinite(); }

} // namespace tlsph

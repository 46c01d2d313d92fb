#ifndef CONEFLOW_SPACETIME_HPP
#define CONEFLOW_SPACETIME_HPP

#include <vector>

#include "coneflow/surface.hpp"

namespace coneflow {

// Time series of fields on one grid. times starts at 0 and increases.
class SpaceTimeField {
public:
    SpaceTimeField(std::vector<double> times, std::vector<ScalarField> frames);

    // constant in time
    static SpaceTimeField constant(ScalarField frame);

    const std::vector<double>& times() const { return times_; }
    const std::vector<ScalarField>& frames() const { return frames_; }
    const ScalarField& frame(std::size_t n) const { return frames_.at(n); }
    const GridSpec& grid() const { return frames_.front().grid(); }
    std::size_t size() const { return frames_.size(); }

    // linear interpolation in time; clamps outside [times.front, times.back]
    ScalarField at_time(double t) const;

private:
    std::vector<double> times_;
    std::vector<ScalarField> frames_;
};

}  // namespace coneflow

#endif

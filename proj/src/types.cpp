#include "ddpc/types.hpp"

namespace ddpc {

IoTrajectory::IoTrajectory(Eigen::MatrixXd inputs, Eigen::MatrixXd outputs,
                           double sample_interval)
    : inputs_(std::move(inputs)),
      outputs_(std::move(outputs)),
      sample_interval_(sample_interval) {
  if (inputs_.cols() != outputs_.cols()) {
    throw DimensionMismatch("IoTrajectory: inputs and outputs differ in length");
  }
  if (inputs_.cols() < 1) {
    throw SignalTooShort("IoTrajectory: needs at least one sample");
  }
  if (sample_interval_ <= 0.0) {
    throw NegativeDuration("IoTrajectory: sample_interval must be positive");
  }
}

IoTrajectory IoTrajectory::from_samples(
    const std::vector<Eigen::VectorXd>& inputs,
    const std::vector<Eigen::VectorXd>& outputs, double sample_interval) {
  if (inputs.size() != outputs.size()) {
    throw DimensionMismatch("IoTrajectory: inputs and outputs differ in length");
  }
  if (inputs.empty()) {
    throw SignalTooShort("IoTrajectory: needs at least one sample");
  }
  const auto kappa = inputs.front().size();
  const auto nu = outputs.front().size();
  Eigen::MatrixXd u(kappa, inputs.size());
  Eigen::MatrixXd y(nu, outputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != kappa || outputs[i].size() != nu) {
      throw DimensionMismatch("IoTrajectory: ragged sample at index " +
                              std::to_string(i));
    }
    u.col(static_cast<Eigen::Index>(i)) = inputs[i];
    y.col(static_cast<Eigen::Index>(i)) = outputs[i];
  }
  return IoTrajectory(std::move(u), std::move(y), sample_interval);
}

}  // namespace ddpc

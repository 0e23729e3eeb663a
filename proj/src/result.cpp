#include "iertc/result.hpp"

namespace iertc {

void Budget::validate() const {
    if (seconds < 0.0) throw InputError("budget: seconds must be non-negative");
    if (!(seconds > 0.0) && max_iterations == 0) throw InputError("budget: needs a time or iteration limit");
}

RunClock::RunClock(ClockKind kind)
    : kind_(kind), start_(std::chrono::steady_clock::now()), checks_at_start_(thread_state_checks()) {}

double RunClock::elapsed() const {
    if (kind_ == ClockKind::Wall)
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return static_cast<double>(thread_state_checks() - checks_at_start_) * kVirtualSecondsPerStateCheck +
           static_cast<double>(distance_evals_) * kVirtualSecondsPerDistanceEval +
           static_cast<double>(iterations_) * kVirtualSecondsPerIteration;
}

void ConvergenceTrace::append(double time, double cost) {
    samples.push_back({time, cost});
}

bool ConvergenceTrace::non_increasing() const {
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (samples[i].cost > samples[i - 1].cost) return false;
    return true;
}

std::string_view to_string(PlanStatus status) {
    return status == PlanStatus::Solved ? "Solved" : "TimedOut";
}

} // namespace iertc
